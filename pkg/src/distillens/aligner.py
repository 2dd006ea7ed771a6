"""Word alignment without external tools.

IBM Model 1 trained by expectation maximization, greedy per-token
alignment under the trained table, and a log-probability score for how
well an alignment explains a sentence pair. Model 1 has no distortion
component, so it is fully determined by the corpus and the iteration
count: initialization is uniform over each source word's co-occurring
target vocabulary and counts are accumulated in sentence order, making
repeated runs bit-identical.

Every source sentence is extended with a leading NULL word that can
absorb target tokens with no lexical counterpart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .corpus_io import Alignment, ParallelCorpus, SentencePair
from .errors import FormatError

__all__ = [
    "NULL_TOKEN",
    "PROB_FLOOR",
    "TranslationTable",
    "train_ibm1",
    "viterbi_align",
    "word_alignment_score",
    "corpus_log_likelihood",
    "read_table",
    "write_table",
]

NULL_TOKEN = "<NULL>"

# Stands in for p(y|x) whenever a pair is out of vocabulary or has
# underflowed to zero, keeping log scores finite.
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class TranslationTable:
    """Word translation probabilities p(target word | source word).

    ``probs[x][y]`` holds p(y|x). Each source word's row sums to one;
    there is always a row for :data:`NULL_TOKEN`.
    """

    probs: dict[str, dict[str, float]]

    def prob(self, source_word: str, target_word: str) -> float:
        """Look up p(target_word | source_word), floored at PROB_FLOOR."""
        row = self.probs.get(source_word)
        if row is None:
            return PROB_FLOOR
        return max(row.get(target_word, 0.0), PROB_FLOOR)

    def source_vocabulary(self) -> list[str]:
        return list(self.probs)


def _cooccurring_targets(corpus: ParallelCorpus) -> dict[str, dict[str, None]]:
    # Inner dicts act as insertion-ordered sets, so iteration order is
    # reproducible without sorting the vocabulary.
    cooc: dict[str, dict[str, None]] = {NULL_TOKEN: {}}
    for pair in corpus:
        for x in (NULL_TOKEN,) + pair.source:
            row = cooc.setdefault(x, {})
            for y in pair.target:
                row[y] = None
    return cooc


def train_ibm1(
    corpus: ParallelCorpus,
    iterations: int,
    on_iteration: Callable[[int, float], None] | None = None,
) -> TranslationTable:
    """Run `iterations` rounds of IBM Model 1 EM over the corpus.

    Starts from a uniform distribution over each source word's
    co-occurring target words. ``on_iteration`` is called after each
    E step with the 1-based round number and the corpus log-likelihood
    of the table that round started from; the likelihood sequence is
    non-decreasing.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if len(corpus) == 0:
        raise ValueError("cannot train on an empty corpus")

    cooc = _cooccurring_targets(corpus)
    table = {x: {y: 1.0 / len(ys) for y in ys} for x, ys in cooc.items()}

    for round_number in range(1, iterations + 1):
        counts: dict[str, dict[str, float]] = {x: {} for x in table}
        totals: dict[str, float] = {x: 0.0 for x in table}
        log_likelihood = 0.0
        for pair in corpus:
            extended = (NULL_TOKEN,) + pair.source
            for y in pair.target:
                scores = [table[x][y] for x in extended]
                z = sum(scores)
                log_likelihood += math.log(z / len(extended))
                for x, score in zip(extended, scores):
                    delta = score / z
                    row = counts[x]
                    row[y] = row.get(y, 0.0) + delta
                    totals[x] += delta
        if on_iteration is not None:
            on_iteration(round_number, log_likelihood)
        table = {
            x: {y: count / totals[x] for y, count in row.items()}
            for x, row in counts.items()
            if totals[x] > 0.0
        }

    return TranslationTable(table)


def corpus_log_likelihood(corpus: ParallelCorpus, table: TranslationTable) -> float:
    """Model 1 log-likelihood of the corpus target sides, in nats."""
    total = 0.0
    for pair in corpus:
        extended = (NULL_TOKEN,) + pair.source
        for y in pair.target:
            z = sum(table.prob(x, y) for x in extended)
            total += math.log(z / len(extended))
    return total


def viterbi_align(pair: SentencePair, table: TranslationTable) -> Alignment:
    """Link each target token to its most probable source word.

    NULL occupies position zero of the extended source sentence, so on
    exact ties the smallest index wins: NULL beats every real position,
    and earlier real positions beat later ones. Tokens won by NULL are
    left out of the returned link set.
    """
    links = set()
    for j, y in enumerate(pair.target):
        best_index = None
        best_prob = table.prob(NULL_TOKEN, y)
        for i, x in enumerate(pair.source):
            p = table.prob(x, y)
            if p > best_prob:
                best_prob = p
                best_index = i
        if best_index is not None:
            links.add((best_index, j))
    return Alignment(frozenset(links))


def word_alignment_score(
    pair: SentencePair, alignment: Alignment, table: TranslationTable
) -> float:
    """Sum of ln p(target token | its aligned source word), in nats.

    A target token linked to several source words is scored against the
    leftmost one; unaligned target tokens are scored against NULL.
    Unseen pairs contribute ln(PROB_FLOOR).
    """
    alignment.validate(len(pair.source), len(pair.target))
    chosen = alignment.leftmost_by_target()
    total = 0.0
    for j, y in enumerate(pair.target):
        i = chosen.get(j)
        x = NULL_TOKEN if i is None else pair.source[i]
        total += math.log(table.prob(x, y))
    return total


def write_table(table: TranslationTable, path: str) -> None:
    """Serialize a table as tab-separated ``x  y  p`` rows, sorted."""
    from .corpus_io import atomic_write

    with atomic_write(path) as fh:
        for x in sorted(table.probs):
            row = table.probs[x]
            for y in sorted(row):
                fh.write(f"{x}\t{y}\t{row[y]!r}\n")


def read_table(path: str) -> TranslationTable:
    """Read a table written by :func:`write_table`."""
    probs: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(
                    "expected `source<TAB>target<TAB>probability`", path=path, line=lineno
                )
            x, y, raw_prob = parts
            try:
                p = float(raw_prob)
            except ValueError:
                raise FormatError(
                    f"unparsable probability {raw_prob!r}", path=path, line=lineno
                ) from None
            if p < 0.0:
                raise FormatError(f"negative probability {raw_prob}", path=path, line=lineno)
            probs.setdefault(x, {})[y] = p
    return TranslationTable(probs)
