"""
Response mapping layer: keyword rules and the action selection built on them.
"""

from __future__ import annotations

import json
from logging import Logger
from typing import Dict, List, Sequence, Tuple

from pydantic import TypeAdapter

from ..core.jsonfile import JsonSchemaError, load_json_file, parse_json_text
from ..core.models import AnomalyClass, MitigationAction, Severity
from ..perception.keywords import best_keyword
from ..perception.models import LEGAL_PAIRS, ParsedClassification
from ..perception.parser import UnparsedResponse
from .models import ActionSelection, KeywordRule

Rulebook = Tuple[KeywordRule, ...]

_RULEBOOK_ADAPTER: TypeAdapter[List[KeywordRule]] = TypeAdapter(List[KeywordRule])

NO_MATCH_SELECTION = ActionSelection(
    severity=Severity.LOW, actions=(MitigationAction.RESUME,)
)
UNPARSED_SELECTION = ActionSelection(
    severity=Severity.HIGH,
    actions=(MitigationAction.SAFE_STOP, MitigationAction.REPORT),
)
_CLASS_FALLBACK = {
    AnomalyClass.HAZARDOUS: ActionSelection(
        severity=Severity.HIGH, actions=(MitigationAction.REPORT,)
    ),
    AnomalyClass.CONFLICT: ActionSelection(
        severity=Severity.MEDIUM, actions=(MitigationAction.AVOID,)
    ),
}


class RulebookError(Exception):
    """Raised when a rulebook file is malformed or inconsistent."""


def default_rulebook() -> Rulebook:
    """
    Anomaly-to-mitigation rules used when a scenario declares none.

    Returns:
        Rulebook: Firearm, fight, obstruction and spill rules; anything else
            falls through to NO_MATCH_SELECTION.
    """
    return (
        KeywordRule(
            keyword="firearm",
            anomaly_class=AnomalyClass.HAZARDOUS,
            severity=Severity.HIGH,
            actions=(MitigationAction.SIREN, MitigationAction.NOTIFY),
        ),
        KeywordRule(
            keyword="fight",
            anomaly_class=AnomalyClass.HAZARDOUS,
            severity=Severity.HIGH,
            actions=(MitigationAction.WARN, MitigationAction.ALERT),
            description="people fighting detected",
        ),
        KeywordRule(
            keyword="obstruction",
            anomaly_class=AnomalyClass.CONFLICT,
            severity=Severity.MEDIUM,
            actions=(MitigationAction.REPLAN,),
        ),
        KeywordRule(
            keyword="spill",
            anomaly_class=AnomalyClass.CONFLICT,
            severity=Severity.MEDIUM,
            actions=(MitigationAction.REPORT, MitigationAction.AVOID),
        ),
    )


def _check_unique(rules: Sequence[KeywordRule]) -> Rulebook:
    seen: set[str] = set()
    for rule in rules:
        key = rule.keyword.lower()
        if key in seen:
            raise RulebookError(f"duplicate rule for keyword '{rule.keyword}'")
        seen.add(key)
    if not rules:
        raise RulebookError("rulebook must not be empty")
    return tuple(rules)


def lookup_rule(rulebook: Rulebook, keyword: str) -> KeywordRule | None:
    """Rule registered for a keyword, case-insensitive."""
    for rule in rulebook:
        if rule.keyword.lower() == keyword.lower():
            return rule
    return None


def canned_responses(rulebook: Rulebook) -> Dict[str, str]:
    """
    Grammar-conformant classifier answer per rule keyword, the input of the
    scripted classifier.
    """
    return {
        rule.keyword: (
            f"{rule.anomaly_class.upper()}: {rule.response_description} "
            f"{LEGAL_PAIRS[rule.anomaly_class].upper()}"
        )
        for rule in rulebook
    }


def select_actions(
    parsed: ParsedClassification | UnparsedResponse,
    rulebook: Rulebook,
    logger: Logger | None = None,
) -> ActionSelection:
    """
    Choose severity and ordered mitigation actions for a classification.

    Args:
        parsed (ParsedClassification | UnparsedResponse): Parser output.
        rulebook (Rulebook): Rules to match the description against.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        ActionSelection: Never empty.
    """
    if not rulebook:
        raise RulebookError("rulebook must not be empty")

    if isinstance(parsed, UnparsedResponse):
        if logger:
            logger.warning("Unparsed classifier output, stopping safely: %s", parsed)
        return UNPARSED_SELECTION

    if parsed.anomaly_class == AnomalyClass.CLEAR:
        return NO_MATCH_SELECTION

    ranks = {rule.keyword: rule.severity.rank for rule in rulebook}
    keyword = best_keyword(parsed.description, ranks)
    rule = lookup_rule(rulebook, keyword) if keyword else None
    if rule is None:
        if logger:
            logger.info(
                "No rule matches '%s', using the %s default",
                parsed.description,
                parsed.anomaly_class,
            )
        return _CLASS_FALLBACK[parsed.anomaly_class]

    return ActionSelection(severity=rule.severity, actions=rule.actions, rule=rule)


def parse_rulebook(text: str) -> Rulebook:
    """
    Parse a rulebook JSON document.

    Raises:
        RulebookError: With the line of the first schema problem.
    """
    try:
        return _check_unique(parse_json_text(text, _RULEBOOK_ADAPTER))
    except JsonSchemaError as e:
        raise RulebookError(f"invalid rulebook, {e}") from e


def load_rulebook(file_path: str) -> Rulebook:
    """
    Load a rulebook JSON file.

    Raises:
        RulebookError: If the file is unreadable or invalid.
    """
    try:
        return _check_unique(load_json_file(file_path, _RULEBOOK_ADAPTER))
    except JsonSchemaError as e:
        raise RulebookError(f"invalid rulebook {file_path}, {e}") from e
    except OSError as e:
        raise RulebookError(f"Error reading rulebook {file_path}") from e


def store_rulebook(rulebook: Rulebook, file_path: str) -> None:
    """Write a rulebook in the format `load_rulebook` reads."""
    payload = [
        rule.model_dump(mode="json", by_alias=True, exclude_none=True)
        for rule in rulebook
    ]
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
