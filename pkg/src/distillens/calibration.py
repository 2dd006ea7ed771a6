"""Model-analysis quantities from exported model outputs.

Two families of measurements live here. From attention exports:
per-matrix attention confidence (mean over target rows of the largest
source weight) and its per-decoding-iteration aggregation. From token
prediction exports: average confidence, token-level accuracy against a
reference via edit-distance matching, and the expected calibration
error (ECE) with equal-width confidence bins.

All quantities are fractions in [0, 1]; callers that want percentages
format them at display time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus_io import AttentionRecord, TokenPredictionRecord
from .errors import ValidationError

__all__ = [
    "Bin",
    "CalibrationReport",
    "attention_confidence",
    "confidence_by_iteration",
    "token_accuracy",
    "expected_calibration_error",
    "average_confidence",
    "fill_correctness",
]

DEFAULT_BINS = 10


@dataclass(frozen=True)
class Bin:
    """One equal-width confidence bin of the reliability diagram."""

    count: int
    mean_confidence: float
    mean_accuracy: float


@dataclass(frozen=True)
class CalibrationReport:
    """Overall accuracy/confidence plus the binned calibration gap.

    The ece field is computed from the bins, so recomputing
    sum((count / total) * abs(mean_accuracy - mean_confidence)) over
    the bins reproduces it bit for bit.
    """

    accuracy: float
    confidence: float
    ece: float
    bins: tuple[Bin, ...]

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "confidence": self.confidence,
            "ece": self.ece,
            "n_bins": len(self.bins),
            "bins": [
                {
                    "count": b.count,
                    "mean_confidence": b.mean_confidence,
                    "mean_accuracy": b.mean_accuracy,
                }
                for b in self.bins
            ],
        }


def attention_confidence(
    attention: AttentionRecord | Sequence[Sequence[float]],
) -> float:
    """Mean over target rows of the row's maximum attention weight.

    Accepts either a parsed attention record or a bare weight matrix
    with one row per target position.
    """
    rows = attention.weights if isinstance(attention, AttentionRecord) else attention
    if not rows:
        raise ValueError("attention matrix has no rows")
    return sum(max(row) for row in rows) / len(rows)


def confidence_by_iteration(
    records: Sequence[AttentionRecord],
) -> dict[int, float]:
    """Mean attention confidence per decoding iteration.

    Every record at an iteration counts once, whatever its sentence or
    head, and the result maps iterations in ascending order.
    """
    if not records:
        raise ValueError("records must be non-empty")
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for record in records:
        sums[record.iteration] = sums.get(record.iteration, 0.0) + attention_confidence(
            record
        )
        counts[record.iteration] = counts.get(record.iteration, 0) + 1
    return {
        iteration: sums[iteration] / counts[iteration]
        for iteration in sorted(sums)
    }


def token_accuracy(
    hypothesis: Sequence[str], reference: Sequence[str]
) -> list[bool]:
    """Per-hypothesis-token correctness under a minimal edit alignment.

    A hypothesis token is correct when a minimum-cost edit alignment
    (unit-cost insert/delete/substitute) pairs it with an identical
    reference token. Ties between equal-cost alignments go first to the
    one with more matches, then to the one whose matched hypothesis
    positions are lexicographically earliest, so the output is unique.

    Two backward passes: one tabulating (cost, -matches) for every pair
    of suffixes, then one selecting the earliest matched-position tuple
    among alignments that stay optimal.
    """
    hyp = list(hypothesis)
    ref = list(reference)
    n_hyp = len(hyp)
    n_ref = len(ref)
    if n_hyp == 0:
        return []

    # best[i][j]: (edit cost, -matches) aligning hyp[i:] with ref[j:]
    best = [[(0, 0)] * (n_ref + 1) for _ in range(n_hyp + 1)]
    for j in range(n_ref + 1):
        best[n_hyp][j] = (n_ref - j, 0)
    for i in range(n_hyp + 1):
        best[i][n_ref] = (n_hyp - i, 0)
    for i in range(n_hyp - 1, -1, -1):
        for j in range(n_ref - 1, -1, -1):
            equal = hyp[i] == ref[j]
            diag_cost, diag_matches = best[i + 1][j + 1]
            diagonal = (
                diag_cost + (0 if equal else 1),
                diag_matches - (1 if equal else 0),
            )
            deletion = (best[i + 1][j][0] + 1, best[i + 1][j][1])
            insertion = (best[i][j + 1][0] + 1, best[i][j + 1][1])
            best[i][j] = min(diagonal, deletion, insertion)

    # matched[i][j]: lexicographically smallest tuple of matched
    # hypothesis positions over alignments achieving best[i][j]
    empty: tuple[int, ...] = ()
    matched: list[list[tuple[int, ...]]] = [
        [empty] * (n_ref + 1) for _ in range(n_hyp + 1)
    ]
    for i in range(n_hyp - 1, -1, -1):
        for j in range(n_ref - 1, -1, -1):
            target = best[i][j]
            equal = hyp[i] == ref[j]
            diag_cost, diag_matches = best[i + 1][j + 1]
            diagonal = (
                diag_cost + (0 if equal else 1),
                diag_matches - (1 if equal else 0),
            )
            choice = None
            if diagonal == target:
                candidate = matched[i + 1][j + 1]
                if equal:
                    candidate = (i,) + candidate
                choice = candidate
            if (best[i + 1][j][0] + 1, best[i + 1][j][1]) == target:
                candidate = matched[i + 1][j]
                if choice is None or candidate < choice:
                    choice = candidate
            if (best[i][j + 1][0] + 1, best[i][j + 1][1]) == target:
                candidate = matched[i][j + 1]
                if choice is None or candidate < choice:
                    choice = candidate
            matched[i][j] = choice

    labels = [False] * n_hyp
    for position in matched[0][0]:
        labels[position] = True
    return labels


def expected_calibration_error(
    records: Sequence[TokenPredictionRecord], n_bins: int = DEFAULT_BINS
) -> CalibrationReport:
    """Bin tokens by confidence and average the accuracy-confidence gap.

    Equal-width bins over [0, 1]; a token with confidence p lands in
    bin min(int(p * n_bins), n_bins - 1). ECE weights each bin's
    absolute gap by its share of the tokens. Empty bins report zero
    means and contribute nothing.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    if not records:
        raise ValueError("records must be non-empty")
    for record in records:
        if record.correct is None:
            raise ValidationError(
                "record for sentence "
                f"{record.sentence_id} position {record.position} has no "
                "correct flag; ingest one or fill it from hypothesis and "
                "reference tokens"
            )
    counts = [0] * n_bins
    confidence_sums = [0.0] * n_bins
    correct_counts = [0] * n_bins
    for record in records:
        index = min(int(record.probability * n_bins), n_bins - 1)
        counts[index] += 1
        confidence_sums[index] += record.probability
        if record.correct:
            correct_counts[index] += 1
    total = len(records)
    bins = []
    ece = 0.0
    for count, conf_sum, correct in zip(counts, confidence_sums, correct_counts):
        if count:
            mean_confidence = conf_sum / count
            mean_accuracy = correct / count
            ece += (count / total) * abs(mean_accuracy - mean_confidence)
        else:
            mean_confidence = 0.0
            mean_accuracy = 0.0
        bins.append(Bin(count, mean_confidence, mean_accuracy))
    accuracy = sum(correct_counts) / total
    confidence = sum(confidence_sums) / total
    return CalibrationReport(accuracy, confidence, ece, tuple(bins))


def average_confidence(records: Sequence[TokenPredictionRecord]) -> float:
    """Unweighted mean probability over all tokens."""
    if not records:
        raise ValueError("records must be non-empty")
    return sum(record.probability for record in records) / len(records)


def fill_correctness(
    records: Sequence[TokenPredictionRecord],
    hypotheses: Mapping[int, Sequence[str]],
    references: Mapping[int, Sequence[str]],
) -> list[TokenPredictionRecord]:
    """Attach correct flags computed by token_accuracy per sentence.

    Records that already carry a flag keep it. For the rest, the
    record's sentence_id selects a hypothesis/reference pair, and the
    record's position and token must agree with that hypothesis.
    """
    flags: dict[int, list[bool]] = {}
    filled = []
    for record in records:
        if record.correct is not None:
            filled.append(record)
            continue
        sid = record.sentence_id
        if sid not in hypotheses:
            raise ValidationError(
                f"no hypothesis for sentence {sid} referenced by a prediction"
            )
        if sid not in references:
            raise ValidationError(
                f"no reference for sentence {sid} referenced by a prediction"
            )
        hyp = list(hypotheses[sid])
        if sid not in flags:
            flags[sid] = token_accuracy(hyp, references[sid])
        if record.position >= len(hyp):
            raise ValidationError(
                f"prediction position {record.position} out of range for "
                f"sentence {sid} ({len(hyp)} hypothesis tokens)"
            )
        if record.token != hyp[record.position]:
            raise ValidationError(
                f"prediction token {record.token!r} at sentence {sid} "
                f"position {record.position} does not match hypothesis "
                f"token {hyp[record.position]!r}"
            )
        filled.append(record.with_correct(flags[sid][record.position]))
    return filled
