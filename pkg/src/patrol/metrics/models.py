# models do not have public methods
# pylint: disable=too-few-public-methods

"""Evaluation result types."""

from __future__ import annotations

import math
from typing import Tuple

from pydantic import Field, model_validator

from ..core.models import FrozenModel

LATENCY_BIN_EDGES_S: Tuple[float, ...] = (0.0, 8.0, 14.0, 20.0, 26.0, math.inf)


class ConfusionCounts(FrozenModel):
    """2x2 confusion matrix of anomaly detection."""

    tp: int = Field(default=0, ge=0)
    fp: int = Field(default=0, ge=0)
    fn: int = Field(default=0, ge=0)
    tn: int = Field(default=0, ge=0)

    @property
    def total(self) -> int:
        """Number of scored samples."""
        return self.tp + self.fp + self.fn + self.tn

    def scaled(self, k: int) -> "ConfusionCounts":
        """Every count multiplied by k."""
        return ConfusionCounts(
            tp=self.tp * k, fp=self.fp * k, fn=self.fn * k, tn=self.tn * k
        )


class LatencyHistogram(FrozenModel):
    """Latency counts over half-open bins [a, b)."""

    bin_edges_s: Tuple[float, ...] = LATENCY_BIN_EDGES_S
    counts: Tuple[int, ...]
    min_s: float
    max_s: float
    mean_s: float

    @model_validator(mode="after")
    def _check_counts(self) -> "LatencyHistogram":
        if len(self.counts) != len(self.bin_edges_s) - 1:
            raise ValueError(
                f"{len(self.counts)} counts for {len(self.bin_edges_s) - 1} bins"
            )
        if not self.min_s <= self.mean_s <= self.max_s:
            raise ValueError(
                f"mean {self.mean_s} outside [{self.min_s}, {self.max_s}]"
            )
        return self

    @property
    def sample_count(self) -> int:
        """Number of binned samples."""
        return sum(self.counts)
