"""
Operational constraint set Omega_safety as data-driven predicates over the
robot state.
"""

from __future__ import annotations

import math
import operator
import re
from logging import Logger
from typing import Callable, Dict, Literal, Tuple

import numpy as np
from pydantic import Field

from .models import FrozenModel, RobotState

Comparator = Literal["<=", "<", ">=", ">", "==", "!="]

_OPERATORS: Dict[str, Callable[[float, float], bool]] = {
    "<=": operator.le,
    "<": operator.lt,
    ">=": operator.ge,
    ">": operator.gt,
    "==": operator.eq,
    "!=": operator.ne,
}
_INDEXED_FIELD = re.compile(r"^(q|v)\[(\d+)\]$")


class ConstraintEvaluationError(Exception):
    """Raised when a predicate cannot be evaluated on a state."""


def _resolve_field(state: RobotState, field: str) -> float:
    """
    Read a named scalar from the robot state.

    Supported fields: `speed`, `heading`, `q[i]`, `v[i]`,
    `min_env_distance`, `env_count`.
    """
    match = _INDEXED_FIELD.match(field)
    if match:
        vector = state.q if match.group(1) == "q" else state.v
        index = int(match.group(2))
        if index >= len(vector):
            raise ConstraintEvaluationError(
                f"{field} out of range for state dimension {len(vector)}"
            )
        return float(vector[index])

    if field == "speed":  # pylint: disable=magic-value-comparison
        return float(np.linalg.norm(state.v))
    if field == "heading":  # pylint: disable=magic-value-comparison
        if state.dim < 3:  # pylint: disable=magic-value-comparison
            raise ConstraintEvaluationError("heading needs a state dimension >= 3")
        return float(state.q[2])
    if field == "min_env_distance":  # pylint: disable=magic-value-comparison
        if not state.env_objects:
            return math.inf
        return float(
            min(np.linalg.norm(obj.q_env[:2]) for obj in state.env_objects)
        )
    if field == "env_count":  # pylint: disable=magic-value-comparison
        return float(len(state.env_objects))

    raise ConstraintEvaluationError(f"unknown state field '{field}'")


class Constraint(FrozenModel):
    """One named predicate: `field op bound`."""

    id: str
    rule: str = ""
    field: str
    op: Comparator = "<="
    bound: float

    def evaluate(self, state: RobotState) -> bool:
        """
        Evaluate the predicate on a state.

        Raises:
            ConstraintEvaluationError: If the field cannot be read from the state.
        """
        value = _resolve_field(state, self.field)
        return bool(_OPERATORS[self.op](value, self.bound))

    @property
    def text(self) -> str:
        """Human-readable rule text."""
        return self.rule or f"{self.field} {self.op} {self.bound:g}"


class ConstraintSet(FrozenModel):
    """Omega_safety: the conjunction of its member constraints."""

    constraints: Tuple[Constraint, ...] = Field(min_length=1)


class ConstraintVerdict(FrozenModel):
    """Result of checking a state against a constraint set."""

    satisfied: bool
    violated_ids: Tuple[str, ...] = ()
    diagnostics: Tuple[str, ...] = ()


def check_constraints(
    state: RobotState, omega: ConstraintSet, logger: Logger | None = None
) -> ConstraintVerdict:
    """
    Check a robot state against every predicate of the constraint set.

    Predicates that cannot be evaluated count as violated.

    Args:
        state (RobotState): State to check.
        omega (ConstraintSet): Constraints in declaration order.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        ConstraintVerdict: Satisfaction flag and the failing ids in declaration order.
    """
    violated = []
    diagnostics = []
    for constraint in omega.constraints:
        try:
            holds = constraint.evaluate(state)
        except ConstraintEvaluationError as e:
            holds = False
            diagnostics.append(f"{constraint.id}: {e}")
            if logger:
                logger.warning("Constraint %s not evaluable: %s", constraint.id, e)
        if not holds:
            violated.append(constraint.id)

    return ConstraintVerdict(
        satisfied=not violated,
        violated_ids=tuple(violated),
        diagnostics=tuple(diagnostics),
    )
