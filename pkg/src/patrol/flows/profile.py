"""
Profile flow: stage profiles from run logs and the latency budget they
support.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import List, Sequence, Tuple, cast

from prefect import flow, task
from prefect.cache_policies import NO_CACHE
from prefect.logging import get_run_logger

from ..budget.allocator import allocate, allocation_overrun, profiles_from_run_logs
from ..budget.models import BudgetAllocation, StageProfile
from ..bus.models import RunLog
from ..scenario.loader import load_run_log
from .flows_utils import write_canonical_json
from .utils import get_t_max_s

BUDGET_FILE = "budget.json"


@task(cache_policy=NO_CACHE)
def load_run_logs(log_paths: Sequence[str]) -> List[RunLog]:
    """Load every run log."""
    logger = cast(Logger, get_run_logger())
    logs = [load_run_log(path) for path in log_paths]
    logger.info(
        "Loaded %d run logs, %d ticks", len(logs), sum(len(log.ticks) for log in logs)
    )
    return logs


def format_allocation(
    profiles: Sequence[StageProfile], alloc: BudgetAllocation
) -> str:
    """Table of stage minimum, mean and timeout."""
    lines = [f"{'stage':<8} {'min_s':>8} {'mean_s':>8} {'timeout_s':>10}"]
    timeouts = alloc.timeout_per_stage
    for p in profiles:
        lines.append(
            f"{p.stage.value:<8} {p.min_s:>8.3f} {p.mean_s:>8.3f} {timeouts[p.stage]:>10.3f}"
        )
    lines.append(
        f"t_max {alloc.t_max_s:.3f} s, worst overrun probability "
        f"{allocation_overrun(alloc, profiles):.4f}"
    )
    return "\n".join(lines)


@flow(
    name="patrol_profile",
    description=(
        "Derive per-stage latency profiles from run logs and split a latency "
        "budget into per-stage timeouts."
    ),
    timeout_seconds=120,
)
def patrol_profile(
    log_paths: List[str],
    t_max_s: float | None = None,
    out_dir: str | None = None,
) -> Tuple[Tuple[StageProfile, ...], BudgetAllocation]:
    """
    Profile stages and allocate the budget.

    Args:
        log_paths (List[str]): Run logs to profile.
        t_max_s (float, optional): Budget, the `patrol_t_max_s` Variable if omitted.
        out_dir (str, optional): Where to write `budget.json`.

    Returns:
        Tuple[Tuple[StageProfile, ...], BudgetAllocation]: Profiles and allocation.

    Raises:
        Infeasible: If the observed minimums exceed the budget.
    """
    logger = cast(Logger, get_run_logger())
    logs = load_run_logs(log_paths)
    profiles = profiles_from_run_logs(logs)
    alloc = allocate(profiles, t_max_s or get_t_max_s(), logger=logger)
    if out_dir:
        payload = {
            "version": 1,
            "profiles": [p.model_dump() for p in profiles],
            "allocation": alloc.model_dump(by_alias=True),
        }
        write_canonical_json(payload, os.path.join(out_dir, BUDGET_FILE), logger)
    return profiles, alloc


if __name__ == "__main__":
    patrol_profile([os.path.join("output", "run.json")])
