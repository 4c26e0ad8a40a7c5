"""Confusion matrix, accuracy, detection rate, preference score and latency bins."""

from .evaluation import (
    DomainError,
    EmptyInput,
    accuracy,
    accuracy_fraction,
    confusion,
    detection_rate,
    f1_score,
    latency_histogram,
    precision,
    preference_score,
    recall,
    share_within,
    to_percent,
)
from .models import LATENCY_BIN_EDGES_S, ConfusionCounts, LatencyHistogram

__all__ = [
    "LATENCY_BIN_EDGES_S",
    "ConfusionCounts",
    "DomainError",
    "EmptyInput",
    "LatencyHistogram",
    "accuracy",
    "accuracy_fraction",
    "confusion",
    "detection_rate",
    "f1_score",
    "latency_histogram",
    "precision",
    "preference_score",
    "recall",
    "share_within",
    "to_percent",
]
