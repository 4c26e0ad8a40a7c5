"""
Latency budget allocation and the compute scaling fit.

Every stage gets its observed minimum plus a share of the slack
`t_max - sum(min)` proportional to its weight lambda (historical mean by
default). Under a shifted-exponential stage model the probability that stage
i overruns its timeout is exp(-(timeout_i - min_i) / lambda_i); proportional
sharing minimizes the worst of these.
"""

from __future__ import annotations

import math
from fractions import Fraction
from logging import Logger
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from ..bus.models import STAGES, RunLog, Stage, StageLatencyTrace
from ..core.clock import to_s, to_us
from .models import BudgetAllocation, BudgetVerdict, ComputeFit, StageProfile

# stages that never took time still need a positive minimum
MIN_PROFILE_S = 1e-6


class Infeasible(Exception):
    """Raised when the stage minimums alone exceed the budget."""


class InsufficientSamples(Exception):
    """Raised when a fit has fewer than two samples."""


def allocate(
    profiles: Sequence[StageProfile],
    t_max_s: float,
    lambdas: Mapping[Stage, float] | None = None,
    logger: Logger | None = None,
) -> BudgetAllocation:
    """
    Split a latency budget into per-stage timeouts.

    Args:
        profiles (Sequence[StageProfile]): One profile per stage.
        t_max_s (float): Total budget in seconds.
        lambdas (Mapping[Stage, float], optional): Slack weights, the stage
            means when omitted.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        BudgetAllocation: Timeouts summing exactly to t_max (in microseconds).

    Raises:
        Infeasible: If the minimums exceed t_max.
        ValueError: If profiles are empty, repeat a stage or a weight is not
            positive.
    """
    if not profiles:
        raise ValueError("at least one stage profile is required")
    stages = [p.stage for p in profiles]
    if len(set(stages)) != len(stages):
        raise ValueError(f"stages repeat: {stages}")

    weights = {p.stage: (lambdas or {}).get(p.stage, p.mean_s) for p in profiles}
    if any(w <= 0 for w in weights.values()):
        raise ValueError(f"slack weights must be positive: {weights}")

    budget_us = to_us(t_max_s)
    mins_us = {p.stage: to_us(p.min_s) for p in profiles}
    slack_us = budget_us - sum(mins_us.values())
    if slack_us < 0:
        raise Infeasible(
            f"stage minimums need {to_s(sum(mins_us.values()))} s, budget is {t_max_s} s"
        )

    # largest remainder keeps the sum exact
    total_weight = sum(Fraction(w) for w in weights.values())
    shares = {s: slack_us * Fraction(weights[s]) / total_weight for s in stages}
    timeouts = {s: mins_us[s] + math.floor(shares[s]) for s in stages}
    leftover = budget_us - sum(timeouts.values())
    by_remainder = sorted(
        stages, key=lambda s: (-(shares[s] - math.floor(shares[s])), STAGES.index(s))
    )
    for stage in by_remainder[:leftover]:
        timeouts[stage] += 1

    if logger:
        logger.info(
            "Allocated %.3f s over %d stages, slack %.3f s",
            t_max_s,
            len(stages),
            to_s(slack_us),
        )
    return BudgetAllocation(timeouts_us=timeouts, t_max_s=t_max_s, lambdas=weights)


def expected_overrun(
    timeouts_s: Mapping[Stage, float],
    profiles: Sequence[StageProfile],
    lambdas: Mapping[Stage, float] | None = None,
) -> float:
    """
    Worst per-stage overrun probability, max_i exp(-(timeout_i - min_i) / lambda_i).

    Lower is better. Timeouts below a stage minimum score 1.
    """
    worst = 0.0
    for p in profiles:
        weight = (lambdas or {}).get(p.stage, p.mean_s)
        slack = max(0.0, timeouts_s[p.stage] - p.min_s)
        worst = max(worst, math.exp(-slack / weight))
    return worst


def allocation_overrun(
    alloc: BudgetAllocation, profiles: Sequence[StageProfile]
) -> float:
    """`expected_overrun` of an allocation with its own weights."""
    return expected_overrun(alloc.timeout_per_stage, profiles, alloc.lambdas)


def enforce_budget(trace: StageLatencyTrace, alloc: BudgetAllocation) -> BudgetVerdict:
    """
    Check a tick's trace against an allocation.

    Returns:
        BudgetVerdict: The first stage (pipeline order) over its timeout, else
            TotalOverrun when the total exceeds t_max, else WithinBudget.
    """
    for stage in STAGES:
        timeout = alloc.timeouts_us.get(stage)
        if timeout is not None and trace.stage_us(stage) > timeout:
            return BudgetVerdict.stage_overrun(stage)
    if trace.total_us > to_us(alloc.t_max_s):
        return BudgetVerdict.total_overrun()
    return BudgetVerdict.within()


def fit_compute_model(samples: Sequence[Tuple[float, float]]) -> ComputeFit:
    """
    Least-squares k of T = k / C.

    k = sum(T_i / C_i) / sum(1 / C_i^2)

    Args:
        samples (Sequence[Tuple[float, float]]): (compute C, latency T) pairs.

    Returns:
        ComputeFit: k and the residual norm.

    Raises:
        InsufficientSamples: If there are fewer than two samples.
        ValueError: If a compute value is not positive.
    """
    if len(samples) < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {len(samples)}")
    data = np.asarray(samples, dtype=np.float64)
    compute, latency = data[:, 0], data[:, 1]
    if np.any(compute <= 0):
        raise ValueError("compute values must be positive")

    inverse = 1.0 / compute
    k = float(np.sum(latency * inverse) / np.sum(inverse**2))
    residual = float(np.linalg.norm(latency - k * inverse))
    return ComputeFit(k=k, residual_norm=residual, sample_count=len(samples))


def profiles_from_traces(
    traces: Iterable[StageLatencyTrace],
) -> Tuple[StageProfile, ...]:
    """
    Stage profiles (minimum and mean) observed over traces.

    Raises:
        InsufficientSamples: If there are no traces.
    """
    durations: Dict[Stage, list[int]] = {s: [] for s in STAGES}
    for trace in traces:
        for stage in STAGES:
            durations[stage].append(trace.stage_us(stage))
    if not durations[Stage.CAMERA]:
        raise InsufficientSamples("no traces to profile")

    profiles = []
    for stage in STAGES:
        values = durations[stage]
        min_s = max(MIN_PROFILE_S, to_s(min(values)))
        mean_s = max(min_s, float(Fraction(sum(values), len(values)) / 1_000_000))
        profiles.append(StageProfile(stage=stage, min_s=min_s, mean_s=mean_s))
    return tuple(profiles)


def profiles_from_run_logs(logs: Iterable[RunLog]) -> Tuple[StageProfile, ...]:
    """Stage profiles over every tick of several run logs."""
    return profiles_from_traces(tick.trace for log in logs for tick in log.ticks)
