# models do not have public methods
# pylint: disable=too-few-public-methods

"""Stage profiles, budget allocations and budget verdicts."""

from __future__ import annotations

from typing import Dict, Literal

from pydantic import ConfigDict, Field, model_validator

from ..bus.models import STAGES, Stage
from ..core.clock import to_s
from ..core.models import FrozenModel


class StageProfile(FrozenModel):
    """Observed minimum and mean duration of one stage."""

    stage: Stage
    min_s: float = Field(gt=0)
    mean_s: float

    @model_validator(mode="after")
    def _check_order(self) -> "StageProfile":
        if self.mean_s < self.min_s:
            raise ValueError(
                f"{self.stage}: mean {self.mean_s} is below min {self.min_s}"
            )
        return self


class BudgetAllocation(FrozenModel):
    """Per-stage timeouts sharing a total latency budget."""

    model_config = ConfigDict(populate_by_name=True)

    timeouts_us: Dict[Stage, int]
    t_max_s: float = Field(gt=0)
    lambdas: Dict[Stage, float] = Field(alias="lambda")

    @property
    def timeout_per_stage(self) -> Dict[Stage, float]:
        """Timeouts in seconds, pipeline order."""
        return {s: to_s(self.timeouts_us[s]) for s in STAGES if s in self.timeouts_us}

    @property
    def total_us(self) -> int:
        """Sum of the timeouts."""
        return sum(self.timeouts_us.values())


class BudgetVerdict(FrozenModel):
    """Outcome of checking a trace against an allocation."""

    kind: Literal["WithinBudget", "StageOverrun", "TotalOverrun"]
    stage: Stage | None = None

    @classmethod
    def within(cls) -> "BudgetVerdict":
        """Every stage and the total fit."""
        return cls(kind="WithinBudget")

    @classmethod
    def stage_overrun(cls, stage: Stage) -> "BudgetVerdict":
        """`stage` exceeded its timeout."""
        return cls(kind="StageOverrun", stage=stage)

    @classmethod
    def total_overrun(cls) -> "BudgetVerdict":
        """The total exceeded t_max without any stage overrun."""
        return cls(kind="TotalOverrun")


class ComputeFit(FrozenModel):
    """Least-squares fit of T = k / C."""

    k: float
    residual_norm: float = Field(ge=0)
    sample_count: int = Field(ge=2)

    def predict(self, compute: float) -> float:
        """Predicted latency for a compute level."""
        return self.k / compute
