"""
Detection metrics.

Scores come from scikit-learn and are turned back into exact fractions of
the confusion counts, so percentages are rounded to 2 decimals only when
returned.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix, precision_recall_fscore_support

from .models import LATENCY_BIN_EDGES_S, ConfusionCounts, LatencyHistogram

# positive class first, so the matrix reads [[tp, fn], [fp, tn]]
_LABELS = [True, False]


class EmptyInput(Exception):
    """Raised when a metric is requested over no samples."""


class DomainError(Exception):
    """Raised when counts are inconsistent or a ratio is undefined."""


def to_percent(value: Fraction) -> float:
    """Fraction in [0, 1] as a percentage rounded to 2 decimals."""
    return float(round(value * 100, 2))


def confusion(pairs: Iterable[Tuple[bool, bool]]) -> ConfusionCounts:
    """
    Count (truth, predicted) pairs.

    Raises:
        EmptyInput: If there are no pairs.
    """
    pairs = [(bool(truth), bool(predicted)) for truth, predicted in pairs]
    if not pairs:
        raise EmptyInput("no (truth, predicted) pairs")
    truth, predicted = zip(*pairs)
    (tp, fn), (fp, tn) = confusion_matrix(truth, predicted, labels=_LABELS)
    return ConfusionCounts(tp=int(tp), fp=int(fp), fn=int(fn), tn=int(tn))


def _label_arrays(c: ConfusionCounts) -> Tuple[np.ndarray, np.ndarray]:
    """Label vectors reproducing the counts."""
    counts = [c.tp, c.fp, c.fn, c.tn]
    truth = np.repeat([True, False, True, False], counts)
    predicted = np.repeat([True, True, False, False], counts)
    return truth, predicted


def _exact(score: float, denominator: int) -> Fraction:
    """Score known to be k / denominator as that exact fraction."""
    return Fraction(round(score * denominator), denominator)


def accuracy_fraction(c: ConfusionCounts) -> Fraction:
    """Exact (tp + tn) / total."""
    if c.total == 0:
        raise EmptyInput("confusion counts are all zero")
    return _exact(float(accuracy_score(*_label_arrays(c))), c.total)


def accuracy(c: ConfusionCounts) -> float:
    """
    Accuracy in percent, 100 (tp + tn) / total.

    Raises:
        EmptyInput: If all counts are zero.
    """
    return to_percent(accuracy_fraction(c))


def _positive_scores(c: ConfusionCounts) -> Tuple[float, float, float]:
    truth, predicted = _label_arrays(c)
    p, r, f, _ = precision_recall_fscore_support(
        truth, predicted, labels=[True], average=None, zero_division=0
    )
    return float(p[0]), float(r[0]), float(f[0])


def _checked(denominator: int, name: str) -> int:
    if denominator == 0:
        raise DomainError(f"{name} is undefined, its denominator is zero")
    return denominator


def precision(c: ConfusionCounts) -> float:
    """tp / (tp + fp) in percent."""
    denominator = _checked(c.tp + c.fp, "precision")
    return to_percent(_exact(_positive_scores(c)[0], denominator))


def recall(c: ConfusionCounts) -> float:
    """tp / (tp + fn) in percent."""
    denominator = _checked(c.tp + c.fn, "recall")
    return to_percent(_exact(_positive_scores(c)[1], denominator))


def f1_score(c: ConfusionCounts) -> float:
    """Harmonic mean of precision and recall in percent."""
    denominator = _checked(2 * c.tp + c.fp + c.fn, "f1")
    return to_percent(_exact(_positive_scores(c)[2], denominator))


def _vote_fraction(u: int, n: int, t: int) -> Fraction:
    if t <= 0:
        raise DomainError(f"total must be positive, got {t}")
    if u < 0 or n < 0:
        raise DomainError(f"counts must be non-negative, got u={u} n={n}")
    if u + n > t:
        raise DomainError(f"u + n = {u + n} exceeds total {t}")
    return (u + Fraction(n, 2)) / t


def preference_score(u: int, n: int, t: int) -> float:
    """
    Share of favourable answers, neutral ones counted half, in percent.

    Args:
        u (int): Favourable answers.
        n (int): Neutral answers.
        t (int): All answers.

    Raises:
        DomainError: If t <= 0, a count is negative or u + n > t.
    """
    return to_percent(_vote_fraction(u, n, t))


def detection_rate(u: int, n: int, t: int) -> float:
    """
    Correct detections, neutral predictions counted half, in percent.

    Same form as `preference_score`.
    """
    return to_percent(_vote_fraction(u, n, t))


def _check_samples(samples_s: Sequence[float]) -> np.ndarray:
    if len(samples_s) == 0:
        raise EmptyInput("no latency samples")
    values = np.asarray(samples_s, dtype=np.float64)
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise DomainError("latency samples must be finite and non-negative")
    return values


def latency_histogram(samples_s: Sequence[float]) -> LatencyHistogram:
    """
    Bin latencies into [0, 8), [8, 14), [14, 20), [20, 26), [26, inf).

    Args:
        samples_s (Sequence[float]): Latencies in seconds.

    Returns:
        LatencyHistogram: Counts with the exact minimum, maximum and mean.

    Raises:
        EmptyInput: If there are no samples.
        DomainError: If a sample is negative or not finite.
    """
    values = _check_samples(samples_s)
    inner_edges = np.asarray(LATENCY_BIN_EDGES_S[1:-1])
    bins = np.searchsorted(inner_edges, values, side="right")
    counts = np.bincount(bins, minlength=len(LATENCY_BIN_EDGES_S) - 1)

    mean = sum((Fraction(float(x)) for x in samples_s), Fraction(0)) / len(samples_s)
    return LatencyHistogram(
        counts=tuple(int(c) for c in counts),
        min_s=float(values.min()),
        max_s=float(values.max()),
        mean_s=float(mean),
    )


def share_within(samples_s: Sequence[float], threshold_s: float) -> float:
    """
    Percentage of latencies strictly below a threshold.

    Raises:
        EmptyInput: If there are no samples.
    """
    values = _check_samples(samples_s)
    if not math.isfinite(threshold_s):
        return 100.0
    below = int(np.count_nonzero(values < threshold_s))
    return to_percent(Fraction(below, len(values)))
