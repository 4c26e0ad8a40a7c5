# models do not have public methods
# pylint: disable=too-few-public-methods

"""Scenario file schema."""

from __future__ import annotations

from typing import Dict, List, Literal, Tuple

from pydantic import Field, field_validator, model_validator

from ..bus.models import BusMode, CaptureMode
from ..core.constraints import ConstraintSet
from ..core.models import (
    DEFAULT_STATE_DIM,
    FrozenModel,
    Grid,
    RobotState,
    TruthLabel,
    WorldFrame,
)
from ..mitigation.models import KeywordRule, RiskTable, WebhookConfig
from ..navsim.models import Cell, GridWorld, NavConfig
from ..perception.models import Backend, RemoteEndpointConfig

SCENARIO_VERSION = 1


class StageDelays(FrozenModel):
    """Injected stage durations of one tick, in seconds."""

    camera_s: float = Field(default=0.0, ge=0)
    blip_s: float = Field(default=0.0, ge=0)
    heatmap_s: float = Field(default=0.0, ge=0)
    llm_s: float = Field(default=0.0, ge=0)


class DelayModel(FrozenModel):
    """
    Shifted-exponential stage delays: min_s + Exp(scale_s), drawn from the
    scenario seed.
    """

    kind: Literal["shifted_exponential"] = "shifted_exponential"
    min_s: StageDelays = StageDelays()
    scale_s: StageDelays = StageDelays()


class FrameSpec(FrozenModel):
    """One scripted frame of a scenario."""

    frame_id: int
    captured_at: float | None = Field(default=None, ge=0)
    scene_tags: Tuple[str, ...] = ()
    feature_maps: Tuple[Grid, ...] = ()
    weights: Tuple[float, ...] = ()
    truth: TruthLabel | None = None
    image_b64: str | None = None
    cell: Cell | None = None
    zone_id: str | None = None
    delays: StageDelays | None = None
    state: RobotState | None = None

    def to_frame(self, captured_at: float) -> WorldFrame:
        """World frame captured at the given virtual time."""
        return WorldFrame(
            frame_id=self.frame_id,
            captured_at=captured_at,
            scene_tags=self.scene_tags,
            feature_maps=self.feature_maps,
            weights=self.weights,
            truth_label=self.truth or TruthLabel.clear(),
            image_b64=self.image_b64,
        )


class PipelineSettings(FrozenModel):
    """Pipeline options declared by a scenario; unset values fall back."""

    capture: CaptureMode | None = None
    ad_enabled: bool | None = None
    t_max_s: float | None = Field(default=None, gt=0)
    backend: Backend | None = None
    remote: RemoteEndpointConfig | None = None
    bus_mode: BusMode | None = None
    queue_size: int | None = Field(default=None, ge=1)
    webhook: WebhookConfig | None = None


class ScenarioFile(FrozenModel):
    """Versioned scenario: world, frames, pipeline options and references."""

    version: Literal[1] = SCENARIO_VERSION
    name: str = "scenario"
    seed: int
    state_dim: int = Field(default=DEFAULT_STATE_DIM, ge=2)
    world: GridWorld | None = None
    nav: NavConfig = NavConfig()
    frames: Tuple[FrameSpec, ...] = Field(min_length=1)
    pipeline: PipelineSettings = PipelineSettings()
    delays: DelayModel | None = None
    rulebook: str | List[KeywordRule] | None = None
    risk_table: str | RiskTable | None = None
    constraints: ConstraintSet | None = None
    lexicon: Dict[str, str] | None = None

    @field_validator("frames")
    @classmethod
    def _check_frame_ids(cls, frames: Tuple[FrameSpec, ...]) -> Tuple[FrameSpec, ...]:
        ids = [f.frame_id for f in frames]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"frame ids repeat: {duplicates}")
        return frames

    @model_validator(mode="after")
    def _check_references(self) -> "ScenarioFile":
        zone_ids = {z.zone_id for z in self.world.zones} if self.world else set()
        for frame in self.frames:
            if frame.zone_id is not None and frame.zone_id not in zone_ids:
                raise ValueError(
                    f"frame {frame.frame_id} shows unknown zone '{frame.zone_id}'"
                )
            if frame.state is not None and frame.state.dim != self.state_dim:
                raise ValueError(
                    f"frame {frame.frame_id} state has dimension {frame.state.dim}, "
                    f"scenario declares {self.state_dim}"
                )
            if self.world and frame.cell and not self.world.in_bounds(frame.cell):
                raise ValueError(f"frame {frame.frame_id} cell {frame.cell} off grid")
        return self
