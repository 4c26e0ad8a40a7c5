"""
Run flow: load a scenario, execute it through the pipeline, archive every
anomaly and write the run log and reports.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import List, TypeVar, cast

from prefect import flow, task
from prefect.cache_policies import NO_CACHE
from prefect.logging import get_run_logger
from pydantic import ValidationError

from ..bus.models import CaptureMode, PipelineConfig, RunLog
from ..bus.pipeline import init_pipeline, run_scenario
from ..core.models import ScenarioInvalid
from ..perception.models import Backend
from ..scenario.loader import LoadedScenario, load_scenario
from .archive import ArchivePaths, archive_run
from .flows_utils import clean_up_output_dir, write_canonical_json
from .report import EvalReport, build_report, write_report
from .utils import (
    get_bus_mode,
    get_capture_interval_s,
    get_output_dir,
    get_queue_size,
    get_t_max_s,
)

RUN_LOG_FILE = "run.json"
ARCHIVE_DIR = "archive"

T = TypeVar("T")


def _first_set(*values: T | None) -> T:
    return next(v for v in values if v is not None)


# pylint: disable=too-many-arguments,too-many-positional-arguments
def build_config(
    loaded: LoadedScenario,
    ad_enabled: bool | None = None,
    backend: Backend | None = None,
    t_max_s: float | None = None,
) -> PipelineConfig:
    """
    Pipeline configuration of a scenario run.

    Precedence is command-line flag, then scenario setting, then Prefect
    Variable.

    Raises:
        ScenarioInvalid: If the combination is invalid, e.g. the remote
            backend without an endpoint.
    """
    settings = loaded.file.pipeline
    try:
        return PipelineConfig(
            capture=settings.capture or CaptureMode(interval_s=get_capture_interval_s()),
            ad_enabled=_first_set(ad_enabled, settings.ad_enabled, True),
            t_max_s=_first_set(t_max_s, settings.t_max_s, get_t_max_s()),
            backend=_first_set(backend, settings.backend, Backend.SCRIPTED),
            remote=settings.remote,
            webhook=settings.webhook,
            bus_mode=settings.bus_mode or get_bus_mode(),
            queue_size=settings.queue_size or get_queue_size(),
        )
    except ValidationError as e:
        raise ScenarioInvalid(f"{loaded.path}: invalid pipeline settings: {e}") from e


@task(cache_policy=NO_CACHE)
def load_scenario_task(scenario_path: str) -> LoadedScenario:
    """Load and validate a scenario file."""
    logger = cast(Logger, get_run_logger())
    return load_scenario(scenario_path, logger=logger)


@task(cache_policy=NO_CACHE)
def execute_scenario(
    loaded: LoadedScenario, cfg: PipelineConfig, seed: int | None = None
) -> RunLog:
    """
    Run a scenario on a fresh pipeline.

    Returns:
        RunLog: Tick results, epsilon and navigation metrics.
    """
    logger = cast(Logger, get_run_logger())
    handle = init_pipeline(
        cfg,
        rulebook=loaded.rulebook,
        risk_table=loaded.risk_table,
        lexicon=loaded.lexicon,
        constraints=loaded.file.constraints,
        logger=logger,
    )
    try:
        return run_scenario(handle, loaded, seed=seed)
    finally:
        handle.close()


@task(cache_policy=NO_CACHE)
def archive_anomalies(
    loaded: LoadedScenario, log: RunLog, out_dir: str
) -> List[ArchivePaths]:
    """
    Save frame, heatmap and report of every anomalous tick.

    Returns:
        List[ArchivePaths]: One triple per anomaly, tick order.
    """
    logger = cast(Logger, get_run_logger())
    archive_dir = os.path.join(out_dir, ARCHIVE_DIR)
    clean_up_output_dir(archive_dir)
    os.makedirs(archive_dir, exist_ok=True)

    specs = {spec.frame_id: spec for spec in loaded.file.frames}
    triples = tuple(
        (
            tick.record,
            tick.heatmap,
            specs[tick.record.frame_id].to_frame(tick.record.captured_at),
        )
        for tick in log.ticks
        if tick.archive
    )
    paths = archive_run(triples, archive_dir, logger=logger)
    logger.info("Archived %d anomalies in %s", len(paths), archive_dir)
    return paths


@task(cache_policy=NO_CACHE)
def write_run_outputs(log: RunLog, out_dir: str) -> EvalReport:
    """Write the run log and its report into the output directory."""
    logger = cast(Logger, get_run_logger())
    write_canonical_json(log, os.path.join(out_dir, RUN_LOG_FILE), logger)
    report = build_report(log, logger=logger)
    write_report(report, out_dir, logger=logger)
    return report


# pylint: disable=too-many-arguments,too-many-positional-arguments
@flow(
    name="patrol_run",
    description=(
        "Run a patrol scenario through the detection pipeline. "
        "First load the scenario using `load_scenario_task`, "
        "run it using `execute_scenario`, archive the anomalies using "
        "`archive_anomalies` and finally write the run log and reports "
        "using `write_run_outputs`."
    ),
    timeout_seconds=600,
)
def patrol_run(
    scenario_path: str,
    ad_enabled: bool | None = None,
    backend: Backend | None = None,
    t_max_s: float | None = None,
    out_dir: str | None = None,
    seed: int | None = None,
) -> EvalReport:
    """
    Execute a scenario and write `run.json`, `report.json`, `report.csv` and
    the anomaly archive.

    Args:
        scenario_path (str): Scenario JSON file.
        ad_enabled (bool, optional): Overrides the scenario's anomaly detection switch.
        backend (Backend, optional): Overrides the scenario's backend.
        t_max_s (float, optional): Overrides the latency budget.
        out_dir (str, optional): Output directory, the `output_dir` Variable if omitted.
        seed (int, optional): Overrides the scenario seed.

    Returns:
        EvalReport: The run's report.
    """
    logger = cast(Logger, get_run_logger())
    out_dir = out_dir or get_output_dir()

    logger.info("Loading scenario %s...", scenario_path)
    loaded = load_scenario_task(scenario_path)
    cfg = build_config(loaded, ad_enabled=ad_enabled, backend=backend, t_max_s=t_max_s)

    logger.info("Running scenario...")
    log = execute_scenario(loaded, cfg, seed=seed)

    logger.info("Archiving anomalies...")
    archive_anomalies(loaded, log, out_dir)

    logger.info("Writing reports to %s...", out_dir)
    return write_run_outputs(log, out_dir)


if __name__ == "__main__":
    patrol_run(os.path.join("demo", "hallway.json"))
