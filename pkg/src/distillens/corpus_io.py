"""Readers and writers for the toolkit's on-disk formats.

Formats handled here:

* Parallel corpus: two plain-text files (source side and target side),
  one sentence per line, tokens separated by whitespace, UTF-8. Files
  are expected to be tokenized upstream; nothing here re-tokenizes.
* Word alignments: Pharaoh format, one line per sentence pair holding
  space-separated ``i-j`` links (0-based source-target index pairs).
  An empty line means the pair has no links.
* K-best lists: ``id ||| token sequence ||| logprob`` lines with
  0-based, non-decreasing sentence ids. Log probabilities are natural
  logs, as are all log quantities in this package.
* Token predictions and attention exports: one JSON object per line.

Alignment files can be parsed without the corpus they belong to; index
bounds are checked when an :class:`Alignment` is joined with its
sentence pair (see :meth:`Alignment.validate`). All parsed structures
are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Sequence

from .errors import FormatError, ValidationError

__all__ = [
    "SentencePair",
    "ParallelCorpus",
    "Alignment",
    "KBestEntry",
    "KBestList",
    "TokenPredictionRecord",
    "AttentionRecord",
    "read_token_lines",
    "write_token_lines",
    "read_parallel_corpus",
    "write_parallel_corpus",
    "parse_pharaoh",
    "format_pharaoh",
    "read_alignments",
    "write_alignments",
    "read_kbest",
    "write_kbest",
    "read_token_predictions",
    "write_token_predictions",
    "read_attention",
    "write_attention",
    "atomic_write",
]

ROW_SUM_TOLERANCE = 1e-4


@dataclass(frozen=True)
class SentencePair:
    """One tokenized source sentence paired with its tokenized target."""

    source: tuple[str, ...]
    target: tuple[str, ...]


@dataclass(frozen=True)
class ParallelCorpus:
    """Ordered sentence pairs; pair i comes from line i of both files."""

    pairs: tuple[SentencePair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)

    def __getitem__(self, index: int) -> SentencePair:
        return self.pairs[index]


@dataclass(frozen=True)
class Alignment:
    """A set of 0-based (source index, target index) links."""

    links: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.links)

    def validate(self, source_length: int, target_length: int | None = None) -> None:
        """Check link indices against the owning pair's lengths.

        ``target_length`` may be None when only the source side is known.
        """
        for i, j in sorted(self.links):
            if i < 0 or i >= source_length:
                raise ValidationError(
                    f"alignment link {i}-{j}: source index out of range "
                    f"for sentence of length {source_length}"
                )
            if j < 0 or (target_length is not None and j >= target_length):
                raise ValidationError(
                    f"alignment link {i}-{j}: target index out of range "
                    f"for sentence of length {target_length}"
                )

    def leftmost_by_target(self) -> dict[int, int]:
        """Map each aligned target position to its smallest linked source index."""
        reduced: dict[int, int] = {}
        for i, j in sorted(self.links):
            if j not in reduced or i < reduced[j]:
                reduced[j] = i
        return {j: reduced[j] for j in sorted(reduced)}

    def min_target_by_source(self) -> dict[int, int]:
        """Map each aligned source position to its smallest linked target index."""
        reduced: dict[int, int] = {}
        for i, j in sorted(self.links):
            if i not in reduced or j < reduced[i]:
                reduced[i] = j
        return {i: reduced[i] for i in sorted(reduced)}


@dataclass(frozen=True)
class KBestEntry:
    """One hypothesis from a k-best list with its teacher log probability."""

    hypothesis: tuple[str, ...]
    nmt_logprob: float


@dataclass(frozen=True)
class KBestList:
    """All hypotheses produced for one source sentence, in file order."""

    sentence_id: int
    entries: tuple[KBestEntry, ...]


@dataclass(frozen=True)
class TokenPredictionRecord:
    """An exported per-token model probability, optionally labelled correct."""

    sentence_id: int
    position: int
    token: str
    probability: float
    correct: bool | None = None

    def with_correct(self, correct: bool) -> "TokenPredictionRecord":
        return replace(self, correct=correct)


@dataclass(frozen=True)
class AttentionRecord:
    """One exported source-target attention matrix.

    ``weights`` has one row per target position and one column per source
    position; every row is a probability distribution over the source.
    """

    sentence_id: int
    iteration: int
    head: int
    weights: tuple[tuple[float, ...], ...]


# ---------------------------------------------------------------------------
# parallel corpus


def read_token_lines(path: str) -> list[tuple[str, ...]]:
    """One whitespace-tokenized sentence per line; blank lines are errors."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            tokens = raw.split()
            if not tokens:
                raise FormatError("empty line", path=path, line=lineno)
            sentences.append(tuple(tokens))
    return sentences


def read_parallel_corpus(src_path: str, tgt_path: str) -> ParallelCorpus:
    """Read a line-parallel pair of token files into a corpus."""
    source = read_token_lines(src_path)
    target = read_token_lines(tgt_path)
    if len(source) != len(target):
        raise ValidationError(
            f"line counts differ: {src_path} has {len(source)} lines, "
            f"{tgt_path} has {len(target)} lines"
        )
    pairs = tuple(SentencePair(s, t) for s, t in zip(source, target))
    return ParallelCorpus(pairs)


def write_parallel_corpus(corpus: ParallelCorpus, src_path: str, tgt_path: str) -> None:
    with atomic_write(src_path) as fh:
        for pair in corpus:
            fh.write(" ".join(pair.source) + "\n")
    with atomic_write(tgt_path) as fh:
        for pair in corpus:
            fh.write(" ".join(pair.target) + "\n")


def write_token_lines(sentences: Sequence[Sequence[str]], path: str) -> None:
    with atomic_write(path) as fh:
        for tokens in sentences:
            fh.write(" ".join(tokens) + "\n")


# ---------------------------------------------------------------------------
# Pharaoh alignments


def parse_pharaoh(line: str, *, path: str | None = None, line_number: int | None = None) -> Alignment:
    """Parse one Pharaoh line (``"0-0 1-2"``) into an Alignment.

    An empty or whitespace-only line parses to an empty link set. Token
    order is irrelevant; duplicate links collapse.
    """
    links = set()
    for offset, token in enumerate(line.split(), start=1):
        left, sep, right = token.partition("-")
        if not sep or not left.isdigit() or not right.isdigit():
            raise FormatError(
                f"malformed alignment link {token!r} at token {offset}",
                path=path,
                line=line_number,
            )
        links.add((int(left), int(right)))
    return Alignment(frozenset(links))


def format_pharaoh(alignment: Alignment) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(alignment.links))


def read_alignments(path: str) -> list[Alignment]:
    """Read one Alignment per line from a Pharaoh file."""
    alignments = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            alignments.append(parse_pharaoh(raw, path=path, line_number=lineno))
    return alignments


def write_alignments(alignments: Sequence[Alignment], path: str) -> None:
    with atomic_write(path) as fh:
        for alignment in alignments:
            fh.write(format_pharaoh(alignment) + "\n")


# ---------------------------------------------------------------------------
# k-best lists


def read_kbest(path: str) -> dict[int, KBestList]:
    """Read a ``id ||| tokens ||| logprob`` file, grouped by sentence id.

    Ids must be non-decreasing so each sentence's hypotheses form one
    contiguous block; order within a block is preserved.
    """
    grouped: dict[int, list[KBestEntry]] = {}
    previous_id: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            parts = line.split(" ||| ")
            if len(parts) != 3:
                raise FormatError(
                    "expected `id ||| tokens ||| logprob`", path=path, line=lineno
                )
            try:
                sentence_id = int(parts[0])
            except ValueError:
                raise FormatError(
                    f"unparsable sentence id {parts[0]!r}", path=path, line=lineno
                ) from None
            if sentence_id < 0:
                raise FormatError("sentence id must be >= 0", path=path, line=lineno)
            if previous_id is not None and sentence_id < previous_id:
                raise FormatError(
                    f"sentence ids must be non-decreasing "
                    f"({sentence_id} after {previous_id})",
                    path=path,
                    line=lineno,
                )
            hypothesis = tuple(parts[1].split())
            if not hypothesis:
                raise FormatError("empty hypothesis", path=path, line=lineno)
            try:
                logprob = float(parts[2])
            except ValueError:
                raise FormatError(
                    f"unparsable log probability {parts[2]!r}", path=path, line=lineno
                ) from None
            if logprob > 0.0:
                raise FormatError(
                    f"log probability must be <= 0, got {parts[2]}", path=path, line=lineno
                )
            grouped.setdefault(sentence_id, []).append(KBestEntry(hypothesis, logprob))
            previous_id = sentence_id
    return {
        sentence_id: KBestList(sentence_id, tuple(entries))
        for sentence_id, entries in grouped.items()
    }


def write_kbest(lists: Mapping[int, KBestList], path: str) -> None:
    with atomic_write(path) as fh:
        for sentence_id in sorted(lists):
            for entry in lists[sentence_id].entries:
                fh.write(
                    f"{sentence_id} ||| {' '.join(entry.hypothesis)} ||| "
                    f"{entry.nmt_logprob!r}\n"
                )


# ---------------------------------------------------------------------------
# token predictions


def _load_json_line(raw: str, path: str, lineno: int) -> dict:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from None
    if not isinstance(record, dict):
        raise FormatError("record must be a JSON object", path=path, line=lineno)
    return record


def _require_int(record: dict, key: str, path: str, lineno: int, minimum: int | None = None) -> int:
    value = record.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {key!r} must be an integer", path=path, line=lineno)
    if minimum is not None and value < minimum:
        raise FormatError(f"field {key!r} must be >= {minimum}", path=path, line=lineno)
    return value


def read_token_predictions(path: str) -> list[TokenPredictionRecord]:
    """Read per-token prediction records from a JSON-lines file."""
    records = []
    seen_positions: set[tuple[int, int]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = _load_json_line(raw, path, lineno)
            sentence_id = _require_int(obj, "sentence_id", path, lineno, minimum=0)
            position = _require_int(obj, "position", path, lineno, minimum=0)
            token = obj.get("token")
            if not isinstance(token, str):
                raise FormatError("field 'token' must be a string", path=path, line=lineno)
            probability = obj.get("probability")
            if isinstance(probability, bool) or not isinstance(probability, (int, float)):
                raise FormatError(
                    "field 'probability' must be a number", path=path, line=lineno
                )
            probability = float(probability)
            if not 0.0 <= probability <= 1.0:
                raise FormatError(
                    f"probability {probability} outside [0, 1]", path=path, line=lineno
                )
            correct = obj.get("correct")
            if correct is not None and not isinstance(correct, bool):
                raise FormatError(
                    "field 'correct' must be a boolean when present", path=path, line=lineno
                )
            key = (sentence_id, position)
            if key in seen_positions:
                raise FormatError(
                    f"duplicate position {position} in sentence {sentence_id}",
                    path=path,
                    line=lineno,
                )
            seen_positions.add(key)
            records.append(
                TokenPredictionRecord(sentence_id, position, token, probability, correct)
            )
    return records


def write_token_predictions(records: Sequence[TokenPredictionRecord], path: str) -> None:
    with atomic_write(path) as fh:
        for record in records:
            obj = {
                "sentence_id": record.sentence_id,
                "position": record.position,
                "token": record.token,
                "probability": record.probability,
            }
            if record.correct is not None:
                obj["correct"] = record.correct
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# attention exports


def read_attention(path: str) -> list[AttentionRecord]:
    """Read attention matrices from a JSON-lines file.

    Rows whose sum is within 1e-4 of one are renormalized exactly; rows
    further off are rejected with the offending record's line number.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = _load_json_line(raw, path, lineno)
            sentence_id = _require_int(obj, "sentence_id", path, lineno, minimum=0)
            iteration = _require_int(obj, "iteration", path, lineno, minimum=1)
            head = _require_int(obj, "head", path, lineno, minimum=0)
            weights = obj.get("weights")
            if not isinstance(weights, list) or not weights:
                raise FormatError(
                    "field 'weights' must be a non-empty matrix", path=path, line=lineno
                )
            rows = []
            width: int | None = None
            for row in weights:
                if not isinstance(row, list) or not row:
                    raise FormatError(
                        "attention rows must be non-empty lists", path=path, line=lineno
                    )
                if width is None:
                    width = len(row)
                elif len(row) != width:
                    raise FormatError(
                        "attention rows must all have the same length",
                        path=path,
                        line=lineno,
                    )
                values = []
                for value in row:
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        raise FormatError(
                            "attention weights must be numbers", path=path, line=lineno
                        )
                    if value < 0.0:
                        raise FormatError(
                            f"negative attention weight {value}", path=path, line=lineno
                        )
                    values.append(float(value))
                total = sum(values)
                if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                    raise FormatError(
                        f"attention row sums to {total!r}, more than "
                        f"{ROW_SUM_TOLERANCE} away from 1",
                        path=path,
                        line=lineno,
                    )
                rows.append(tuple(value / total for value in values))
            records.append(AttentionRecord(sentence_id, iteration, head, tuple(rows)))
    return records


def write_attention(records: Sequence[AttentionRecord], path: str) -> None:
    with atomic_write(path) as fh:
        for record in records:
            obj = {
                "sentence_id": record.sentence_id,
                "iteration": record.iteration,
                "head": record.head,
                "weights": [list(row) for row in record.weights],
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# atomic output


@contextmanager
def atomic_write(path: str):
    """Write to a temp file and rename into place on success.

    On any error the temp file is removed, so the destination is either
    untouched or complete.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp.", suffix="~")
    try:
        # mkstemp creates 0600 files; honour the umask like open() would
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp_path, 0o666 & ~mask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
