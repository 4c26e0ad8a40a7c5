"""Topic bus, pipeline nodes and the detection loop."""

# models first: scenario and budget import them back from this package
from .models import (
    STAGES,
    TOPIC_PAYLOADS,
    BusMode,
    CaptureMode,
    ClassifierOutput,
    Message,
    PipelineConfig,
    RunLog,
    Stage,
    StageLatencyTrace,
    TickResult,
    Topic,
)
from .message_bus import BusClosed, MessageBus, UnknownTopic  # isort: skip
from .nodes import NODE_ORDER, InitOrderViolation  # isort: skip
from .pipeline import (  # isort: skip
    Pipeline,
    draw_delays,
    init_pipeline,
    run_scenario,
    run_tick,
    state_of,
)

__all__ = [
    "NODE_ORDER",
    "STAGES",
    "TOPIC_PAYLOADS",
    "BusClosed",
    "BusMode",
    "CaptureMode",
    "ClassifierOutput",
    "InitOrderViolation",
    "Message",
    "MessageBus",
    "Pipeline",
    "PipelineConfig",
    "RunLog",
    "Stage",
    "StageLatencyTrace",
    "TickResult",
    "Topic",
    "UnknownTopic",
    "draw_delays",
    "init_pipeline",
    "run_scenario",
    "run_tick",
    "state_of",
]
