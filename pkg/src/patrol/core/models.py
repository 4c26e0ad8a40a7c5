"""
Task tuple types shared across the pipeline: robot state, goal, trajectory,
world frames, hazard sets and the anomaly records built from them.
"""

from __future__ import annotations

import json
from enum import StrEnum
from typing import Any, Tuple

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)

Vector = Tuple[float, ...]
Grid = Tuple[Tuple[float, ...], ...]

DEFAULT_STATE_DIM = 3


class AnomalyClass(StrEnum):
    """Classification outcome of a single frame."""

    HAZARDOUS = "Hazardous"
    CONFLICT = "Conflict"
    CLEAR = "Clear"
    UNPARSED = "Unparsed"


class Directive(StrEnum):
    """Action token the classifier emits alongside the anomaly class."""

    REPORT = "Report"
    AVOID = "Avoid"
    RESUME = "Resume"


class Severity(StrEnum):
    """Severity of a mitigation rule."""

    HIGH = "High"
    MEDIUM = "Medium"
    LOW = "Low"

    @property
    def rank(self) -> int:
        """Numeric rank, higher is more severe."""
        return {"High": 3, "Medium": 2, "Low": 1}[self.value]


class MitigationAction(StrEnum):
    """Concrete response triggered by a classification."""

    SIREN = "Siren"
    NOTIFY = "Notify"
    WARN = "Warn"
    ALERT = "Alert"
    REPLAN = "Replan"
    REPORT = "Report"
    AVOID = "Avoid"
    RESUME = "Resume"
    SAFE_STOP = "SafeStop"


# pylint: disable=too-few-public-methods
class FrozenModel(BaseModel):
    """Base class for immutable domain types."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class EnvObject(FrozenModel):
    """Observed environment object, pose relative to the robot (meters)."""

    label: str = "object"
    q_env: Vector


class RobotState(FrozenModel):
    """Robot state S = (q, v, q_env)."""

    q: Vector
    v: Vector
    env_objects: Tuple[EnvObject, ...] = ()

    @model_validator(mode="after")
    def _check_dimensions(self) -> "RobotState":
        if len(self.q) < 2:
            raise ValueError(f"state dimension must be >= 2, got {len(self.q)}")
        if len(self.q) != len(self.v):
            raise ValueError(
                f"q and v dimensions differ: {len(self.q)} != {len(self.v)}"
            )
        for obj in self.env_objects:
            if len(obj.q_env) != len(self.q):
                raise ValueError(
                    f"env object '{obj.label}' has dimension {len(obj.q_env)}, "
                    f"expected {len(self.q)}"
                )
        return self

    @property
    def dim(self) -> int:
        """State dimension n."""
        return len(self.q)


class Goal(FrozenModel):
    """
    Goal q_g in the robot workspace.

    Validating with a `state_dim` context, or building through `for_state`,
    also pins the goal to that state dimension.
    """

    target: Vector

    @model_validator(mode="after")
    def _check_dimension(self, info: ValidationInfo) -> "Goal":
        if len(self.target) < 2:
            raise ValueError(f"goal dimension must be >= 2, got {len(self.target)}")
        state_dim = (info.context or {}).get("state_dim")
        if state_dim is not None and len(self.target) != state_dim:
            raise ValueError(
                f"goal has dimension {len(self.target)}, the state has {state_dim}"
            )
        return self

    @classmethod
    def for_state(cls, target: Vector, state: RobotState) -> "Goal":
        """
        Goal for a given robot state.

        Raises:
            ValidationError: If the dimensions differ.
        """
        return cls.model_validate({"target": target}, context={"state_dim": state.dim})

    def matches(self, state: RobotState) -> bool:
        """Whether the goal has the same dimension as the given state."""
        return len(self.target) == state.dim


class TrajectorySample(FrozenModel):
    """One sample of a planned trajectory."""

    t: float
    position: Vector
    velocity: Vector


class Trajectory(FrozenModel):
    """Sampled polyline pi: [0, T] -> R^n."""

    samples: Tuple[TrajectorySample, ...] = Field(min_length=1)

    @field_validator("samples")
    @classmethod
    def _check_times(
        cls, samples: Tuple[TrajectorySample, ...]
    ) -> Tuple[TrajectorySample, ...]:
        if samples[0].t != 0:
            raise ValueError(f"trajectory must start at t=0, got {samples[0].t}")
        for prev, cur in zip(samples, samples[1:]):
            if cur.t <= prev.t:
                raise ValueError(
                    f"trajectory times must increase strictly: {prev.t} -> {cur.t}"
                )
        return samples

    @property
    def duration(self) -> float:
        """End time T."""
        return self.samples[-1].t


class TruthLabel(FrozenModel):
    """Ground truth attached to a scripted frame."""

    anomaly: bool = False
    kind: str | None = None

    @classmethod
    def clear(cls) -> "TruthLabel":
        """Label of a frame without anomaly."""
        return cls(anomaly=False)

    @classmethod
    def present(cls, kind: str) -> "TruthLabel":
        """Label of a frame showing an anomaly of the given kind."""
        return cls(anomaly=True, kind=kind)


class WorldFrame(FrozenModel):
    """One perception sample, the scripted stand-in for a camera image."""

    frame_id: int
    captured_at: float = Field(default=0.0, ge=0)
    scene_tags: Tuple[str, ...] = ()
    feature_maps: Tuple[Grid, ...] = ()
    weights: Tuple[float, ...] = ()
    truth_label: TruthLabel = TruthLabel()
    image_b64: str | None = None

    @model_validator(mode="after")
    def _check_maps(self) -> "WorldFrame":
        shapes = {
            (len(grid), len(grid[0]) if grid else 0) for grid in self.feature_maps
        }
        if len(shapes) > 1:
            raise ValueError(
                f"frame {self.frame_id}: feature maps differ in shape {sorted(shapes)}"
            )
        for grid in self.feature_maps:
            if len({len(row) for row in grid}) > 1:
                raise ValueError(f"frame {self.frame_id}: ragged feature map")
        if self.weights and len(self.weights) != len(self.feature_maps):
            raise ValueError(
                f"frame {self.frame_id}: {len(self.weights)} weights for "
                f"{len(self.feature_maps)} feature maps"
            )
        return self


def _sorted_unique(values: Tuple[str, ...]) -> Tuple[str, ...]:
    return tuple(sorted(set(values)))


class HazardSets(FrozenModel):
    """Known hazardous state classes H and loss classes L."""

    hazardous: Tuple[str, ...] = ()
    loss: Tuple[str, ...] = ()

    _normalize_hazardous = field_validator("hazardous")(_sorted_unique)
    _normalize_loss = field_validator("loss")(_sorted_unique)

    def is_hazardous(self, state_class: str) -> bool:
        """Whether the state class belongs to H."""
        return state_class in self.hazardous

    def register_loss(self, state_class: str, loss_class: str) -> "HazardSets":
        """
        Record a loss event: the state that led to it joins H.

        Args:
            state_class (str): State class the robot was in.
            loss_class (str): Loss class that occurred.

        Returns:
            HazardSets: A new set with both classes registered.
        """
        return HazardSets(
            hazardous=self.hazardous + (state_class,),
            loss=self.loss + (loss_class,),
        )


def canonical_bytes(payload: Any) -> bytes:
    """Serialize a JSON-compatible payload to canonical bytes."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


class StateSnapshot(FrozenModel):
    """Immutable copy of the robot state at a frame capture."""

    frame_id: int
    captured_at: float
    q: Vector
    v: Vector
    env_objects: Tuple[EnvObject, ...] = ()

    def to_bytes(self) -> bytes:
        """Deterministic serialized form."""
        return canonical_bytes(self.model_dump(mode="json"))


def snapshot_state(state: RobotState, frame: WorldFrame) -> StateSnapshot:
    """
    Take an immutable snapshot of the robot state for a frame.

    Args:
        state (RobotState): Current robot state.
        frame (WorldFrame): Frame the snapshot belongs to.

    Returns:
        StateSnapshot: Snapshot carrying the frame id and capture time.
    """
    return StateSnapshot(
        frame_id=frame.frame_id,
        captured_at=frame.captured_at,
        q=tuple(state.q),
        v=tuple(state.v),
        env_objects=tuple(state.env_objects),
    )


class AnomalyRecord(FrozenModel):
    """Classified anomaly with its severity and robot-state snapshot."""

    frame_id: int
    captured_at: float = 0.0
    anomaly_class: AnomalyClass
    description: str = ""
    directive: Directive | None = None
    severity: Severity = Severity.LOW
    hazard_class: str | None = None
    risk_of_loss: float | None = Field(default=None, ge=0, le=1)
    snapshot: StateSnapshot | None = None
    raw_response: str = ""

    @property
    def is_anomaly(self) -> bool:
        """Whether the record is anything other than Clear."""
        return self.anomaly_class != AnomalyClass.CLEAR


class DetectionOutcome(FrozenModel):
    """Detection result scored against truth, input to the epsilon update."""

    record: AnomalyRecord
    confidence: float = Field(default=1.0, ge=0, le=1)
    correct: bool | None = None
    latency_s: float = Field(default=0.0, ge=0)


class ScenarioInvalid(Exception):
    """Raised when a scenario violates its schema or invariants."""
