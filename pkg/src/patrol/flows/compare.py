"""
Compare flow: the same scenario without and with anomaly detection.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import List, cast

from prefect import flow
from prefect.logging import get_run_logger

from .report import EvalReport, build_report, write_summary_csv
from .run import build_config, execute_scenario, load_scenario_task
from .utils import get_output_dir

COMPARISON_FILE = "comparison.csv"


@flow(
    name="patrol_compare",
    description=(
        "Run one scenario with anomaly detection off and on and write a "
        "two-row WoAD/WAD comparison."
    ),
    timeout_seconds=600,
)
def patrol_compare(
    scenario_path: str,
    out_dir: str | None = None,
    seed: int | None = None,
) -> List[EvalReport]:
    """
    Run a scenario in both conditions and write `comparison.csv`.

    Args:
        scenario_path (str): Scenario JSON file.
        out_dir (str, optional): Output directory, the `output_dir` Variable if omitted.
        seed (int, optional): Overrides the scenario seed.

    Returns:
        List[EvalReport]: WoAD then WAD report.
    """
    logger = cast(Logger, get_run_logger())
    out_dir = out_dir or get_output_dir()
    loaded = load_scenario_task(scenario_path)

    reports = []
    for ad_enabled in (False, True):
        logger.info("Running with anomaly detection %s...", "on" if ad_enabled else "off")
        cfg = build_config(loaded, ad_enabled=ad_enabled)
        log = execute_scenario(loaded, cfg, seed=seed)
        reports.append(build_report(log, logger=logger))

    write_summary_csv(reports, os.path.join(out_dir, COMPARISON_FILE), logger=logger)
    return reports


if __name__ == "__main__":
    patrol_compare(os.path.join("demo", "hallway.json"))
