"""Formal task tuple, robot state, hazard sets and operational constraints."""

from .clock import Clock, VirtualClock, WallClock, to_s, to_us
from .constraints import (
    Constraint,
    ConstraintEvaluationError,
    ConstraintSet,
    ConstraintVerdict,
    check_constraints,
)
from .models import (
    DEFAULT_STATE_DIM,
    AnomalyClass,
    AnomalyRecord,
    DetectionOutcome,
    Directive,
    EnvObject,
    Goal,
    HazardSets,
    MitigationAction,
    RobotState,
    ScenarioInvalid,
    Severity,
    StateSnapshot,
    Trajectory,
    TrajectorySample,
    TruthLabel,
    WorldFrame,
    canonical_bytes,
    snapshot_state,
)

__all__ = [
    "DEFAULT_STATE_DIM",
    "AnomalyClass",
    "AnomalyRecord",
    "Clock",
    "Constraint",
    "ConstraintEvaluationError",
    "ConstraintSet",
    "ConstraintVerdict",
    "DetectionOutcome",
    "Directive",
    "EnvObject",
    "Goal",
    "HazardSets",
    "MitigationAction",
    "RobotState",
    "ScenarioInvalid",
    "Severity",
    "StateSnapshot",
    "Trajectory",
    "TrajectorySample",
    "TruthLabel",
    "VirtualClock",
    "WallClock",
    "WorldFrame",
    "canonical_bytes",
    "check_constraints",
    "snapshot_state",
    "to_s",
    "to_us",
]
