"""Scenario files and run logs."""

from .loader import (
    LoadedScenario,
    LogSchemaError,
    load_run_log,
    load_scenario,
    parse_scenario,
    resolve_scenario,
)
from .models import (
    SCENARIO_VERSION,
    DelayModel,
    FrameSpec,
    PipelineSettings,
    ScenarioFile,
    StageDelays,
)

__all__ = [
    "SCENARIO_VERSION",
    "DelayModel",
    "FrameSpec",
    "LoadedScenario",
    "LogSchemaError",
    "PipelineSettings",
    "ScenarioFile",
    "StageDelays",
    "load_run_log",
    "load_scenario",
    "parse_scenario",
    "resolve_scenario",
]
