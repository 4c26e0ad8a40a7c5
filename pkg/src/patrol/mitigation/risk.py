"""Risk of loss R_i(S_h) per hazard class, kept for explainability."""

from __future__ import annotations

import json
from typing import Dict

from pydantic import TypeAdapter

from ..core.jsonfile import JsonSchemaError, load_json_file
from ..core.models import HazardSets
from .models import RiskTable
from .rulebook import RulebookError

_RISK_ADAPTER: TypeAdapter[RiskTable] = TypeAdapter(RiskTable)


class UnknownHazardClass(Exception):
    """Raised when a hazard class has no risk table entry."""


def default_risk_table() -> RiskTable:
    """Placeholder loss probabilities for the default rulebook keywords."""
    return RiskTable(
        entries={
            "firearm": {"injury": 0.9},
            "fight": {"injury": 0.8},
            "obstruction": {"collision": 0.4},
            "spill": {"slip": 0.3},
        }
    )


def risk_of_loss(
    hazard_class: str, table: RiskTable, loss_class: str | None = None
) -> float:
    """
    Probability that a hazardous state leads to loss.

    Args:
        hazard_class (str): Hazard class, usually the matched rule keyword.
        table (RiskTable): Risk table to read.
        loss_class (str, optional): Specific loss class; the most likely loss
            is used when omitted.

    Returns:
        float: Probability in [0, 1].

    Raises:
        UnknownHazardClass: If the hazard or loss class is not in the table.
    """
    losses = table.entries.get(hazard_class)
    if losses is None:
        raise UnknownHazardClass(f"no risk entry for hazard class '{hazard_class}'")
    if loss_class is None:
        return max(losses.values())
    if loss_class not in losses:
        raise UnknownHazardClass(
            f"no risk entry for '{hazard_class}' -> '{loss_class}'"
        )
    return losses[loss_class]


def hazard_sets_from(table: RiskTable) -> HazardSets:
    """Hazard and loss sets covered by a risk table."""
    return HazardSets(
        hazardous=tuple(table.entries),
        loss=tuple(loss for losses in table.entries.values() for loss in losses),
    )


def uncovered_losses(sets: HazardSets, table: RiskTable) -> Dict[str, str]:
    """
    Table entries that violate the hazard set invariant.

    Returns:
        Dict[str, str]: Loss class -> hazard class for every risk entry whose
            hazard class is missing from H or whose loss class is missing
            from L. Empty when the sets cover the table.
    """
    missing: Dict[str, str] = {}
    for hazard, losses in table.entries.items():
        for loss in losses:
            if not sets.is_hazardous(hazard) or loss not in sets.loss:
                missing[loss] = hazard
    return missing


def load_risk_table(file_path: str) -> RiskTable:
    """
    Load a risk table from `{"entries": {hazard: {loss: p}}}` JSON.

    Raises:
        RulebookError: If the file is unreadable or a probability is invalid.
    """
    try:
        return load_json_file(file_path, _RISK_ADAPTER)
    except JsonSchemaError as e:
        raise RulebookError(f"invalid risk table {file_path}, {e}") from e
    except OSError as e:
        raise RulebookError(f"Error reading risk table {file_path}") from e


def store_risk_table(table: RiskTable, file_path: str) -> None:
    """Write a risk table in the format `load_risk_table` reads."""
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(table.model_dump(mode="json"), f, indent=2, sort_keys=True)
        f.write("\n")
