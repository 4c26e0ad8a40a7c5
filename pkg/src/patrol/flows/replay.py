"""
Replay flow: recompute the evaluation report of a stored run log.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import Tuple, cast

from prefect import flow, task
from prefect.cache_policies import NO_CACHE
from prefect.logging import get_run_logger

from ..bus.models import RunLog
from ..scenario.loader import load_run_log
from .report import EvalReport, SurveyCounts, build_report, write_report


@task(cache_policy=NO_CACHE)
def load_run_log_task(log_path: str) -> RunLog:
    """Load and validate a run log."""
    logger = cast(Logger, get_run_logger())
    logger.info("Loading run log %s...", log_path)
    log = load_run_log(log_path)
    logger.info("Run log has %d ticks", len(log.ticks))
    return log


def cmd_replay(
    log_path: str,
    survey: Tuple[int, int, int] | None = None,
    logger: Logger | None = None,
) -> EvalReport:
    """
    Recompute every metric of a run log without re-running the pipeline.

    Args:
        log_path (str): Run log file.
        survey (Tuple[int, int, int], optional): Favourable, neutral and total
            survey answers for the preference score.
        logger (Logger, optional): Logger for logging messages.

    Raises:
        LogSchemaError: If the log is malformed or empty.
        DomainError: If the survey counts are inconsistent.
    """
    log = load_run_log(log_path)
    counts = SurveyCounts(u=survey[0], n=survey[1], t=survey[2]) if survey else None
    return build_report(log, survey=counts, logger=logger)


@flow(
    name="patrol_replay",
    description=(
        "Recompute detection, latency and navigation metrics of a run log. "
        "Load the log using `load_run_log_task` and write `report.json` and "
        "`report.csv`."
    ),
    timeout_seconds=120,
)
def patrol_replay(
    log_path: str,
    survey: Tuple[int, int, int] | None = None,
    out_dir: str | None = None,
) -> EvalReport:
    """
    Replay a run log into an evaluation report.

    Args:
        log_path (str): Run log file.
        survey (Tuple[int, int, int], optional): U, N and T survey counts.
        out_dir (str, optional): Where to write the report; nothing is
            written when omitted.

    Returns:
        EvalReport: The recomputed report.
    """
    logger = cast(Logger, get_run_logger())
    log = load_run_log_task(log_path)
    counts = SurveyCounts(u=survey[0], n=survey[1], t=survey[2]) if survey else None
    report = build_report(log, survey=counts, logger=logger)
    if out_dir:
        write_report(report, out_dir, logger=logger)
    return report


if __name__ == "__main__":
    patrol_replay(os.path.join("output", "run.json"))
