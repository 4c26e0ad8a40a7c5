"""
Detection loop: frame, caption and heatmap, classification, mitigation.

Latencies are charged on a virtual clock from the injected stage delays,
except for remote calls whose measured time is charged as is.
"""

from __future__ import annotations

import threading
from logging import Logger
from typing import Dict, List, Mapping, Sequence

import numpy as np

from ..core.clock import VirtualClock, to_s, to_us
from ..core.constraints import ConstraintSet, check_constraints
from ..core.models import (
    DEFAULT_STATE_DIM,
    AnomalyClass,
    AnomalyRecord,
    DetectionOutcome,
    RobotState,
    WorldFrame,
    snapshot_state,
)
from ..mitigation.epsilon import EpsilonTracker, update_epsilon
from ..mitigation.models import ActionLogEntry, ActionSelection, RiskTable
from ..mitigation.responders import SimulatedSinks, execute_action, make_sinks
from ..mitigation.risk import UnknownHazardClass, default_risk_table, risk_of_loss
from ..mitigation.rulebook import (
    NO_MATCH_SELECTION,
    Rulebook,
    canned_responses,
    default_rulebook,
    select_actions,
)
from ..navsim.models import NavMetrics
from ..navsim.simulate import simulate_run
from ..perception.models import Backend
from ..perception.parser import UnparsedResponse
from ..perception.remote import RemoteClient
from ..perception.scripted import DEFAULT_LEXICON
from ..scenario.loader import LoadedScenario
from ..scenario.models import FrameSpec, ScenarioFile, StageDelays
from .message_bus import MessageBus
from .models import (
    ClassifierOutput,
    Message,
    PipelineConfig,
    RunLog,
    StageLatencyTrace,
    TickResult,
    Topic,
)
from .nodes import (
    CAMERA,
    CAPTIONER,
    CLASSIFIER,
    HEATMAP,
    NODE_ORDER,
    CameraNode,
    CaptionerNode,
    ClassifierNode,
    HeatmapNode,
    InitOrderViolation,
    Node,
    PassThroughClassifier,
)

# how long a tick waits on the concurrent bus before checking for failures
_POLL_S = 0.05


class Pipeline:
    """Handle on an initialized pipeline."""

    # pylint: disable=too-many-instance-attributes,too-many-arguments,too-many-positional-arguments
    def __init__(
        self,
        cfg: PipelineConfig,
        rulebook: Rulebook,
        risk_table: RiskTable,
        lexicon: Mapping[str, str],
        constraints: ConstraintSet | None = None,
        sinks: SimulatedSinks | None = None,
        logger: Logger | None = None,
    ):
        self.cfg = cfg
        self.rulebook = rulebook
        self.risk_table = risk_table
        self.constraints = constraints
        self.sinks = sinks or make_sinks(cfg.webhook, logger=logger)
        self.logger = logger

        self.clock = VirtualClock()
        self.tracker = EpsilonTracker(enabled=cfg.ad_enabled, t_max_s=cfg.t_max_s)
        self.bus = MessageBus(mode=cfg.bus_mode, queue_size=cfg.queue_size, logger=logger)

        remote = None
        if cfg.backend == Backend.REMOTE and cfg.remote is not None:
            remote = RemoteClient(cfg.remote, logger=logger)

        classifier_cls = ClassifierNode if cfg.ad_enabled else PassThroughClassifier
        self.classifier = classifier_cls(
            self.bus, self.clock, canned_responses(rulebook), remote=remote, logger=logger
        )
        self.heatmap = HeatmapNode(
            self.bus, self.clock, cfg.activation_threshold, cfg.max_regions, logger
        )
        self.captioner = CaptionerNode(
            self.bus, self.clock, lexicon, remote=remote, logger=logger
        )
        self.camera = CameraNode(self.bus, self.clock, logger)
        self.nodes: Dict[str, Node] = {
            CLASSIFIER: self.classifier,
            HEATMAP: self.heatmap,
            CAPTIONER: self.captioner,
            CAMERA: self.camera,
        }

        self._outputs: Dict[int, ClassifierOutput] = {}
        self._arrived: Dict[int, threading.Event] = {}
        self._outputs_lock = threading.Lock()
        self.reports: List[AnomalyRecord] = []
        self.bus.subscribe(Topic.LLM_CLASSIFICATION, self._collect)
        self.bus.subscribe(Topic.ANOMALY_REPORT, self._report)

    def _event(self, frame_id: int) -> threading.Event:
        with self._outputs_lock:
            return self._arrived.setdefault(frame_id, threading.Event())

    def _collect(self, msg: Message) -> None:
        output: ClassifierOutput = msg.payload
        with self._outputs_lock:
            self._outputs[output.frame_id] = output
        self._event(output.frame_id).set()

    def _report(self, msg: Message) -> None:
        self.reports.append(msg.payload)

    def start_node(self, name: str) -> None:
        """
        Start one node.

        Raises:
            InitOrderViolation: If a producer starts before the classifier.
        """
        node = self.nodes[name]
        if node.started:
            return
        if name != CLASSIFIER and not self.classifier.ready:
            raise InitOrderViolation(f"{name} started before the classifier was ready")
        node.start()

    def start(self) -> None:
        """Start every node in init order."""
        for name in NODE_ORDER:
            self.start_node(name)

    @property
    def ready(self) -> bool:
        """Whether every node has started."""
        return all(node.started for node in self.nodes.values())

    def wait_for(self, frame_id: int) -> ClassifierOutput:
        """Block until the classification of a frame has arrived."""
        event = self._event(frame_id)
        while not event.wait(_POLL_S):
            self.bus.raise_failures()
        with self._outputs_lock:
            self._arrived.pop(frame_id, None)
            return self._outputs.pop(frame_id)

    def reset(self) -> None:
        """Fresh clock, epsilon and responders for a new run."""
        self.clock = VirtualClock()
        for node in self.nodes.values():
            node.clock = self.clock
        self.tracker = EpsilonTracker(enabled=self.cfg.ad_enabled, t_max_s=self.cfg.t_max_s)
        self.sinks = make_sinks(self.cfg.webhook, logger=self.logger)
        self.reports.clear()

    def close(self) -> None:
        """Stop the bus workers."""
        self.bus.close()


# pylint: disable=too-many-arguments,too-many-positional-arguments
def init_pipeline(
    cfg: PipelineConfig,
    rulebook: Rulebook | None = None,
    risk_table: RiskTable | None = None,
    lexicon: Mapping[str, str] | None = None,
    constraints: ConstraintSet | None = None,
    sinks: SimulatedSinks | None = None,
    autostart: bool = True,
    logger: Logger | None = None,
) -> Pipeline:
    """
    Build a pipeline and start its nodes in init order.

    Args:
        cfg (PipelineConfig): Pipeline configuration.
        rulebook (Rulebook, optional): Mitigation rules, the default rulebook if omitted.
        risk_table (RiskTable, optional): Loss probabilities, defaults if omitted.
        lexicon (Mapping[str, str], optional): Caption phrases per scene tag.
        constraints (ConstraintSet, optional): Operational constraints to check.
        sinks (SimulatedSinks, optional): Responders.
        autostart (bool): Start the nodes; pass False to start them by hand.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        Pipeline: The pipeline handle.
    """
    handle = Pipeline(
        cfg,
        rulebook=rulebook or default_rulebook(),
        risk_table=risk_table or default_risk_table(),
        lexicon=lexicon or DEFAULT_LEXICON,
        constraints=constraints,
        sinks=sinks,
        logger=logger,
    )
    if autostart:
        handle.start()
    if logger:
        logger.info(
            "Pipeline ready: AD %s, %s backend, %s bus",
            "on" if cfg.ad_enabled else "off",
            cfg.backend,
            cfg.bus_mode,
        )
    return handle


def _risk(handle: Pipeline, selection: ActionSelection) -> tuple[str | None, float | None]:
    if selection.rule is None:
        return None, None
    hazard = selection.rule.keyword
    try:
        return hazard, risk_of_loss(hazard, handle.risk_table)
    except UnknownHazardClass as e:
        if handle.logger:
            handle.logger.warning("No risk of loss for '%s': %s", hazard, e)
        return hazard, None


def _zero_state(dim: int) -> RobotState:
    zeros = (0.0,) * dim
    return RobotState(q=zeros, v=zeros)


# pylint: disable=too-many-locals
def run_tick(
    handle: Pipeline,
    frame: WorldFrame,
    state: RobotState | None = None,
    delays: StageDelays | None = None,
    zone_id: str | None = None,
    labelled: bool = True,
) -> TickResult:
    """
    Run one detection iteration for a frame.

    The tick starts at the later of the capture time and the end of the
    previous tick.

    Args:
        handle (Pipeline): Started pipeline.
        frame (WorldFrame): Captured frame.
        state (RobotState, optional): Robot state at capture, zeros if omitted.
        delays (StageDelays, optional): Injected stage durations.
        zone_id (str, optional): Anomaly zone the frame looks at.
        labelled (bool): Whether the frame's truth label is known; unlabelled
            ticks are neither correct nor wrong.

    Returns:
        TickResult: Record, latency trace, executed actions and requests for
            archiving and replanning.

    Raises:
        InitOrderViolation: If the pipeline has not been started.
    """
    if not handle.ready:
        raise InitOrderViolation("capture requested before every node started")
    delays = delays or StageDelays()
    state = state or _zero_state(DEFAULT_STATE_DIM)
    logger = handle.logger

    start_us = handle.clock.advance_to_us(to_us(frame.captured_at))
    handle.clock.advance_us(to_us(delays.camera_s))
    handle.camera.capture(frame)
    output = handle.wait_for(frame.frame_id)

    if not handle.cfg.ad_enabled:
        llm_us = 0
    elif handle.cfg.backend == Backend.REMOTE:
        llm_us = output.network_us + output.processing_us
    else:
        llm_us = to_us(delays.llm_s)
    blip_us = handle.captioner.pop_elapsed_us(frame.frame_id)
    trace = StageLatencyTrace(
        camera_us=to_us(delays.camera_s),
        blip_us=to_us(delays.blip_s) if blip_us is None else blip_us,
        heatmap_us=to_us(delays.heatmap_s),
        llm_us=llm_us,
        network_us=output.network_us,
        processing_us=output.processing_us,
    )
    handle.clock.advance_us(trace.blip_us + trace.heatmap_us + trace.llm_us)

    parsed = output.parsed
    if not handle.cfg.ad_enabled:
        selection = NO_MATCH_SELECTION
    elif parsed is not None:
        selection = select_actions(parsed, handle.rulebook, logger=logger)
    else:
        unparsed = UnparsedResponse(output.raw, output.error or "no answer")
        selection = select_actions(unparsed, handle.rulebook, logger=logger)
    hazard, risk = _risk(handle, selection)

    record = AnomalyRecord(
        frame_id=frame.frame_id,
        captured_at=frame.captured_at,
        anomaly_class=parsed.anomaly_class if parsed else AnomalyClass.UNPARSED,
        description=parsed.description if parsed else output.error or "",
        directive=parsed.directive if parsed else None,
        severity=selection.severity,
        hazard_class=hazard,
        risk_of_loss=risk,
        snapshot=snapshot_state(state, frame),
        raw_response=output.raw,
    )

    at = handle.clock.now_s()
    actions: List[ActionLogEntry] = [
        execute_action(action, handle.sinks, record, at) for action in selection.actions
    ]
    if record.is_anomaly:
        handle.camera.publish(Topic.ANOMALY_REPORT, record)
        if logger:
            logger.info(
                "Frame %d: %s '%s' -> %s",
                frame.frame_id,
                record.anomaly_class,
                record.description,
                ", ".join(a.action for a in actions),
            )

    truth = frame.truth_label if labelled else None
    correct = truth.anomaly == record.is_anomaly if truth is not None else None
    if handle.cfg.ad_enabled:
        update_epsilon(
            handle.tracker,
            DetectionOutcome(
                record=record,
                confidence=1.0 if parsed else 0.0,
                correct=correct,
                latency_s=trace.t_total_s,
            ),
        )

    verdict = None
    if handle.constraints is not None:
        verdict = check_constraints(state, handle.constraints, logger=logger)
    return TickResult(
        record=record,
        trace=trace,
        actions=tuple(actions),
        started_at=to_s(start_us),
        archive=record.is_anomaly,
        replan_zone=zone_id if record.is_anomaly else None,
        verdict=verdict,
        truth=truth,
        correct=correct,
        epsilon=handle.tracker.epsilon,
        heatmap=handle.heatmap.heatmaps.pop(frame.frame_id, None),
    )


def draw_delays(scenario: ScenarioFile, seed: int) -> Dict[int, StageDelays]:
    """
    Stage delays of every frame: declared per frame, else drawn from the
    scenario's delay model with the run seed, else zero.
    """
    rng = np.random.default_rng(seed)
    model = scenario.delays
    delays: Dict[int, StageDelays] = {}
    for spec in scenario.frames:
        if spec.delays is not None:
            delays[spec.frame_id] = spec.delays
        elif model is not None:
            drawn = {}
            for name in ("camera_s", "blip_s", "heatmap_s", "llm_s"):
                low = getattr(model.min_s, name)
                scale = getattr(model.scale_s, name)
                extra = float(rng.exponential(scale)) if scale > 0 else 0.0
                drawn[name] = to_s(to_us(low + extra))
            delays[spec.frame_id] = StageDelays(**drawn)
        else:
            delays[spec.frame_id] = StageDelays()
    return delays


def state_of(spec: FrameSpec, scenario: ScenarioFile) -> RobotState:
    """Robot state at a frame: declared, else placed on the frame's cell."""
    if spec.state is not None:
        return spec.state
    state = _zero_state(scenario.state_dim)
    if spec.cell is None or scenario.world is None:
        return state
    size = scenario.world.cell_size_m
    q = (spec.cell[0] * size, spec.cell[1] * size) + (0.0,) * (scenario.state_dim - 2)
    return RobotState(q=q, v=state.v)


def _capture_times(handle: Pipeline, frames: Sequence[FrameSpec]) -> List[float | None]:
    capture = handle.cfg.capture
    if capture.kind == "Periodic":
        return [
            spec.captured_at if spec.captured_at is not None else i * capture.interval_s
            for i, spec in enumerate(frames)
        ]
    return [spec.captured_at for spec in frames]


def run_scenario(
    handle: Pipeline, loaded: LoadedScenario, seed: int | None = None
) -> RunLog:
    """
    Run every frame of a scenario through the pipeline, then simulate the
    patrol with the zones the detector flagged.

    Args:
        handle (Pipeline): Started pipeline, reset before the run.
        loaded (LoadedScenario): Scenario with its references resolved.
        seed (int, optional): Overrides the scenario seed.

    Returns:
        RunLog: Tick results, epsilon trajectory and navigation metrics.

    Raises:
        ScenarioInvalid: If the world cannot be patrolled.
    """
    scenario = loaded.file
    seed = scenario.seed if seed is None else seed
    logger = handle.logger
    handle.reset()
    if logger:
        logger.info("Running scenario '%s' (%d frames)", scenario.name, len(scenario.frames))

    delays = draw_delays(scenario, seed)
    times = _capture_times(handle, scenario.frames)
    ticks: List[TickResult] = []
    for spec, captured_at in zip(scenario.frames, times):
        at = handle.clock.now_s() if captured_at is None else captured_at
        ticks.append(
            run_tick(
                handle,
                spec.to_frame(at),
                state=state_of(spec, scenario),
                delays=delays[spec.frame_id],
                zone_id=spec.zone_id,
                labelled=spec.truth is not None,
            )
        )

    nav: NavMetrics | None = None
    if scenario.world is not None:
        detected = {t.replan_zone for t in ticks if t.replan_zone is not None}
        nav = simulate_run(
            scenario.world,
            scenario.nav,
            ad_enabled=handle.cfg.ad_enabled,
            detected_zones=detected,
            logger=logger,
        )

    log = RunLog(
        scenario=scenario.name,
        seed=seed,
        ad_enabled=handle.cfg.ad_enabled,
        t_max_s=handle.cfg.t_max_s,
        ticks=tuple(ticks),
        final_epsilon=handle.tracker.epsilon,
        epsilon_history=tuple(step.epsilon for step in handle.tracker.history),
        nav=nav,
    )
    if logger:
        logger.info(
            "Scenario '%s' done: %d anomalies, epsilon %.3f",
            scenario.name,
            len(log.anomaly_records),
            log.final_epsilon,
        )
    return log
