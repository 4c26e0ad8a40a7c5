# models do not have public methods
# pylint: disable=too-few-public-methods

"""Topics, messages, pipeline configuration, latency traces and run logs."""

from __future__ import annotations

from enum import StrEnum
from typing import Any, Dict, Literal, Tuple

from pydantic import Field, model_validator

from ..core.clock import to_s
from ..core.constraints import ConstraintVerdict
from ..core.models import AnomalyRecord, FrozenModel, TruthLabel, WorldFrame
from ..mitigation.models import ActionLogEntry, WebhookConfig
from ..navsim.models import NavMetrics
from ..perception.models import (
    Backend,
    Caption,
    ParsedClassification,
    RemoteEndpointConfig,
)
from ..saliency.heatmap import Heatmap, HeatmapSummary

RUN_LOG_VERSION = 1
DEFAULT_QUEUE_SIZE = 64
DEFAULT_CAPTURE_INTERVAL_S = 5.0
DEFAULT_T_MAX_S = 30.0


class Topic(StrEnum):
    """Bus topics."""

    CAMERA_IMAGE = "camera/image"
    BLIP_CAPTION = "blip/caption"
    HEATMAP_SUMMARY = "heatmap/summary"
    LLM_CLASSIFICATION = "llm/classification"
    ANOMALY_REPORT = "anomaly/report"


class Stage(StrEnum):
    """Pipeline stages whose durations compose the total detection time."""

    CAMERA = "Camera"
    BLIP = "Blip"
    HEATMAP = "Heatmap"
    LLM = "Llm"


STAGES: Tuple[Stage, ...] = (Stage.CAMERA, Stage.BLIP, Stage.HEATMAP, Stage.LLM)


class BusMode(StrEnum):
    """Delivery scheduler."""

    DETERMINISTIC = "deterministic"
    CONCURRENT = "concurrent"


class ClassifierOutput(FrozenModel):
    """Classifier answer for one frame, parsed when it follows the grammar."""

    frame_id: int
    raw: str
    parsed: ParsedClassification | None = None
    error: str | None = None
    network_us: int = Field(default=0, ge=0)
    processing_us: int = Field(default=0, ge=0)


TOPIC_PAYLOADS: Dict[Topic, type] = {
    Topic.CAMERA_IMAGE: WorldFrame,
    Topic.BLIP_CAPTION: Caption,
    Topic.HEATMAP_SUMMARY: HeatmapSummary,
    Topic.LLM_CLASSIFICATION: ClassifierOutput,
    Topic.ANOMALY_REPORT: AnomalyRecord,
}


class Message(FrozenModel):
    """Payload published on a topic; `seq` is assigned by the bus."""

    topic: Topic
    payload: Any
    published_at: float = Field(default=0.0, ge=0)
    seq: int = -1

    @model_validator(mode="after")
    def _check_payload(self) -> "Message":
        expected = TOPIC_PAYLOADS[self.topic]
        if not isinstance(self.payload, expected):
            raise ValueError(
                f"{self.topic} carries {expected.__name__}, "
                f"got {type(self.payload).__name__}"
            )
        return self


class StageLatencyTrace(FrozenModel):
    """
    Per-stage durations of one tick in integer microseconds.

    The total is the plain sum of the four stages; the classifier stage splits
    into network and processing time when the remote backend is used.
    """

    camera_us: int = Field(default=0, ge=0)
    blip_us: int = Field(default=0, ge=0)
    heatmap_us: int = Field(default=0, ge=0)
    llm_us: int = Field(default=0, ge=0)
    network_us: int = Field(default=0, ge=0)
    processing_us: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_remote_split(self) -> "StageLatencyTrace":
        split = self.network_us + self.processing_us
        if split and split != self.llm_us:
            raise ValueError(
                f"network + processing ({split} us) must equal llm ({self.llm_us} us)"
            )
        return self

    @property
    def total_us(self) -> int:
        """Sum of the stage durations."""
        return self.camera_us + self.blip_us + self.heatmap_us + self.llm_us

    def stage_us(self, stage: Stage) -> int:
        """Duration of one stage."""
        return {
            Stage.CAMERA: self.camera_us,
            Stage.BLIP: self.blip_us,
            Stage.HEATMAP: self.heatmap_us,
            Stage.LLM: self.llm_us,
        }[stage]

    @property
    def t_camera_s(self) -> float:
        """Camera stage in seconds."""
        return to_s(self.camera_us)

    @property
    def t_blip_s(self) -> float:
        """Caption stage in seconds."""
        return to_s(self.blip_us)

    @property
    def t_heatmap_s(self) -> float:
        """Heatmap stage in seconds."""
        return to_s(self.heatmap_us)

    @property
    def t_llm_s(self) -> float:
        """Classifier stage in seconds."""
        return to_s(self.llm_us)

    @property
    def t_network_s(self) -> float:
        """Network share of the classifier stage in seconds."""
        return to_s(self.network_us)

    @property
    def t_processing_s(self) -> float:
        """Server processing share of the classifier stage in seconds."""
        return to_s(self.processing_us)

    @property
    def t_total_s(self) -> float:
        """Total detection time in seconds."""
        return to_s(self.total_us)


class CaptureMode(FrozenModel):
    """When frames are captured: on request or every `interval_s` seconds."""

    kind: Literal["OnRequest", "Periodic"] = "Periodic"
    interval_s: float = Field(default=DEFAULT_CAPTURE_INTERVAL_S, gt=0)


class PipelineConfig(FrozenModel):
    """Configuration of one pipeline instance."""

    capture: CaptureMode = CaptureMode()
    ad_enabled: bool = True
    t_max_s: float = Field(default=DEFAULT_T_MAX_S, gt=0)
    backend: Backend = Backend.SCRIPTED
    remote: RemoteEndpointConfig | None = None
    bus_mode: BusMode = BusMode.DETERMINISTIC
    webhook: WebhookConfig | None = None
    queue_size: int = Field(default=DEFAULT_QUEUE_SIZE, ge=1)
    activation_threshold: float = Field(default=0.5, gt=0, le=1)
    max_regions: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def _check_remote(self) -> "PipelineConfig":
        if self.backend == Backend.REMOTE and self.remote is None:
            raise ValueError("the remote backend needs a remote endpoint config")
        return self


class TickResult(FrozenModel):
    """Outcome of one detection tick."""

    record: AnomalyRecord
    trace: StageLatencyTrace
    actions: Tuple[ActionLogEntry, ...] = Field(min_length=1)
    started_at: float = 0.0
    archive: bool = False
    replan_zone: str | None = None
    verdict: ConstraintVerdict | None = None
    truth: TruthLabel | None = None
    correct: bool | None = None
    epsilon: float = 0.0
    heatmap: Heatmap | None = None


class RunLog(FrozenModel):
    """Ordered tick results of one scenario run."""

    version: int = RUN_LOG_VERSION
    scenario: str = ""
    seed: int = 0
    ad_enabled: bool = True
    t_max_s: float = Field(default=DEFAULT_T_MAX_S, gt=0)
    ticks: Tuple[TickResult, ...] = ()
    final_epsilon: float = Field(default=0.0, ge=0, le=1)
    epsilon_history: Tuple[float, ...] = ()
    nav: NavMetrics | None = None

    @property
    def anomaly_records(self) -> Tuple[AnomalyRecord, ...]:
        """Every non-Clear record in tick order."""
        return tuple(t.record for t in self.ticks if t.record.is_anomaly)
