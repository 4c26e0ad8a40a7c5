"""Latency budget allocation and compute scaling."""

from .allocator import (
    Infeasible,
    InsufficientSamples,
    allocate,
    allocation_overrun,
    enforce_budget,
    expected_overrun,
    fit_compute_model,
    profiles_from_run_logs,
    profiles_from_traces,
)
from .models import BudgetAllocation, BudgetVerdict, ComputeFit, StageProfile

__all__ = [
    "BudgetAllocation",
    "BudgetVerdict",
    "ComputeFit",
    "Infeasible",
    "InsufficientSamples",
    "StageProfile",
    "allocate",
    "allocation_overrun",
    "enforce_budget",
    "expected_overrun",
    "fit_compute_model",
    "profiles_from_run_logs",
    "profiles_from_traces",
]
