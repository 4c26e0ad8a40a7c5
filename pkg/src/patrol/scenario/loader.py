"""Loading scenario files and run logs."""

from __future__ import annotations

import os
from dataclasses import dataclass
from logging import Logger
from typing import Dict

from pydantic import TypeAdapter

from ..bus.models import RunLog
from ..core.jsonfile import JsonSchemaError, load_json_file, parse_json_text
from ..core.models import ScenarioInvalid
from ..mitigation.models import RiskTable
from ..mitigation.risk import default_risk_table, load_risk_table
from ..mitigation.rulebook import (
    Rulebook,
    RulebookError,
    default_rulebook,
    load_rulebook,
)
from ..perception.scripted import DEFAULT_LEXICON
from .models import ScenarioFile

_SCENARIO_ADAPTER: TypeAdapter[ScenarioFile] = TypeAdapter(ScenarioFile)
_RUN_LOG_ADAPTER: TypeAdapter[RunLog] = TypeAdapter(RunLog)


class LogSchemaError(Exception):
    """Raised when a run log is malformed or empty."""


@dataclass(frozen=True)
class LoadedScenario:
    """Scenario with its references resolved."""

    file: ScenarioFile
    rulebook: Rulebook
    risk_table: RiskTable
    lexicon: Dict[str, str]
    path: str


def _resolve(base_dir: str, ref: str) -> str:
    return ref if os.path.isabs(ref) else os.path.join(base_dir, ref)


def resolve_scenario(
    scenario: ScenarioFile, base_dir: str = ".", path: str = "<memory>"
) -> LoadedScenario:
    """
    Resolve rulebook and risk table references of a scenario.

    Args:
        scenario (ScenarioFile): Parsed scenario.
        base_dir (str): Directory relative references are resolved against.
        path (str): Scenario origin, used in messages.

    Raises:
        ScenarioInvalid: If a referenced file is missing or invalid, or a
            scene tag has no lexicon phrase.
    """
    try:
        if scenario.rulebook is None:
            rulebook = default_rulebook()
        elif isinstance(scenario.rulebook, str):
            rulebook = load_rulebook(_resolve(base_dir, scenario.rulebook))
        else:
            rulebook = tuple(scenario.rulebook)
            if not rulebook:
                raise RulebookError("rulebook must not be empty")

        if scenario.risk_table is None:
            risk_table = default_risk_table()
        elif isinstance(scenario.risk_table, str):
            risk_table = load_risk_table(_resolve(base_dir, scenario.risk_table))
        else:
            risk_table = scenario.risk_table
    except RulebookError as e:
        raise ScenarioInvalid(f"{path}: {e}") from e

    lexicon = dict(DEFAULT_LEXICON)
    lexicon.update(scenario.lexicon or {})
    for frame in scenario.frames:
        unknown = [tag for tag in frame.scene_tags if tag not in lexicon]
        if unknown:
            raise ScenarioInvalid(
                f"{path}: frame {frame.frame_id} has tags without a phrase: {unknown}"
            )
    return LoadedScenario(
        file=scenario,
        rulebook=rulebook,
        risk_table=risk_table,
        lexicon=lexicon,
        path=path,
    )


def parse_scenario(text: str, base_dir: str = ".", path: str = "<memory>") -> LoadedScenario:
    """
    Parse and resolve a scenario document.

    Raises:
        ScenarioInvalid: With the line of the first problem.
    """
    try:
        scenario = parse_json_text(text, _SCENARIO_ADAPTER)
    except JsonSchemaError as e:
        raise ScenarioInvalid(f"{path}: {e}") from e
    return resolve_scenario(scenario, base_dir=base_dir, path=path)


def load_scenario(path: str, logger: Logger | None = None) -> LoadedScenario:
    """
    Load a scenario file.

    Args:
        path (str): Scenario JSON file.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        LoadedScenario: Validated scenario with references resolved.

    Raises:
        ScenarioInvalid: If the file is unreadable or invalid.
    """
    if logger:
        logger.info("Loading scenario %s...", path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ScenarioInvalid(f"{path}: cannot read scenario") from e
    loaded = parse_scenario(
        text, base_dir=os.path.dirname(os.path.abspath(path)), path=path
    )
    if logger:
        logger.info(
            "Scenario '%s' has %d frames, seed %d",
            loaded.file.name,
            len(loaded.file.frames),
            loaded.file.seed,
        )
    return loaded


def load_run_log(path: str) -> RunLog:
    """
    Load a run log written by `run`.

    Raises:
        LogSchemaError: If the log is unreadable, invalid or has no ticks.
    """
    try:
        log = load_json_file(path, _RUN_LOG_ADAPTER)
    except JsonSchemaError as e:
        raise LogSchemaError(f"{path}: {e}") from e
    except OSError as e:
        raise LogSchemaError(f"{path}: cannot read run log") from e
    if not log.ticks:
        raise LogSchemaError(f"{path}: run log has no ticks")
    return log
