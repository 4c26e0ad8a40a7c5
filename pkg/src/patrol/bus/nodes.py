"""
Pipeline nodes: camera, captioner, heatmap and classifier.

Nodes must start in the order classifier, heatmap, captioner, camera; no
producer may start before the classifier is ready.
"""

from __future__ import annotations

import threading
from logging import Logger
from typing import Dict, Mapping, Tuple, cast

from ..core.clock import Clock, to_s, to_us
from ..core.models import WorldFrame
from ..perception.models import Backend, Caption, ParsedClassification, PromptContext
from ..perception.parser import UnparsedResponse, parse_response
from ..perception.prompt import render_prompt
from ..perception.remote import RemoteClient, RemoteProtocolError, RemoteTimeout
from ..perception.scripted import scripted_caption, scripted_classify
from ..saliency.heatmap import (
    Heatmap,
    HeatmapSummary,
    combine_feature_maps,
    summarize_heatmap,
)
from .message_bus import MessageBus
from .models import ClassifierOutput, Message, Topic

CLASSIFIER = "classifier"
HEATMAP = "heatmap"
CAPTIONER = "captioner"
CAMERA = "camera"
NODE_ORDER: Tuple[str, ...] = (CLASSIFIER, HEATMAP, CAPTIONER, CAMERA)


class InitOrderViolation(Exception):
    """Raised when a producer node starts before the classifier is ready."""


class Node:
    """Base class of pipeline nodes."""

    name = "node"

    def __init__(self, bus: MessageBus, clock: Clock, logger: Logger | None = None):
        self.bus = bus
        self.clock = clock
        self.logger = logger
        self.started = False

    def start(self) -> None:
        """Subscribe to inputs and mark the node started."""
        self.started = True
        if self.logger:
            self.logger.info("Node %s started", self.name)

    def publish(self, topic: Topic, payload: object) -> int:
        """Publish a payload stamped with the current clock time."""
        return self.bus.publish(
            Message(topic=topic, payload=payload, published_at=to_s(self.clock.now_us()))
        )


class CameraNode(Node):
    """Publishes captured frames on `camera/image`."""

    name = CAMERA

    def capture(self, frame: WorldFrame) -> int:
        """
        Publish a frame.

        Raises:
            InitOrderViolation: If the node has not been started.
        """
        if not self.started:
            raise InitOrderViolation("camera captured before it was started")
        return self.publish(Topic.CAMERA_IMAGE, frame)


class CaptionerNode(Node):
    """
    Captions frames from `camera/image` onto `blip/caption`.

    A failed remote caption is published as a placeholder carrying the error,
    so the frame still reaches the classifier and ends in a safe stop.
    """

    name = CAPTIONER
    unavailable_text = "caption unavailable"

    def __init__(
        self,
        bus: MessageBus,
        clock: Clock,
        lexicon: Mapping[str, str],
        remote: RemoteClient | None = None,
        logger: Logger | None = None,
    ):
        super().__init__(bus, clock, logger)
        self.lexicon = lexicon
        self.remote = remote
        self._elapsed_us: Dict[int, int] = {}
        self._lock = threading.Lock()

    def start(self) -> None:
        self.bus.subscribe(Topic.CAMERA_IMAGE, self.on_frame)
        super().start()

    def pop_elapsed_us(self, frame_id: int) -> int | None:
        """Measured remote caption time of a frame, None if it was scripted."""
        with self._lock:
            return self._elapsed_us.pop(frame_id, None)

    def _remote_caption(self, remote: RemoteClient, frame: WorldFrame) -> Caption:
        try:
            caption, reply = remote.caption_reply(cast(str, frame.image_b64), frame.frame_id)
            elapsed_us = to_us(reply.t_network_s) + to_us(reply.t_processing_s)
        except (RemoteTimeout, RemoteProtocolError) as e:
            if self.logger:
                self.logger.warning("Frame %d not captioned: %s", frame.frame_id, e)
            caption = Caption(
                text=self.unavailable_text,
                source_frame=frame.frame_id,
                backend=Backend.REMOTE,
                error=str(e),
            )
            elapsed_us = remote.failure_us(e)
        with self._lock:
            self._elapsed_us[frame.frame_id] = elapsed_us
        return caption

    def on_frame(self, msg: Message) -> None:
        """Caption one frame; remote only when the frame carries an image."""
        frame: WorldFrame = msg.payload
        if self.remote is not None and frame.image_b64:
            caption = self._remote_caption(self.remote, frame)
        else:
            caption = scripted_caption(frame, self.lexicon)
        self.publish(Topic.BLIP_CAPTION, caption)


class HeatmapNode(Node):
    """Turns frame feature maps into `heatmap/summary` payloads."""

    name = HEATMAP

    # pylint: disable=too-many-arguments,too-many-positional-arguments
    def __init__(
        self,
        bus: MessageBus,
        clock: Clock,
        activation_threshold: float,
        max_regions: int,
        logger: Logger | None = None,
    ):
        super().__init__(bus, clock, logger)
        self.activation_threshold = activation_threshold
        self.max_regions = max_regions
        self.heatmaps: Dict[int, Heatmap] = {}
        self._lock = threading.Lock()

    def start(self) -> None:
        self.bus.subscribe(Topic.CAMERA_IMAGE, self.on_frame)
        super().start()

    def on_frame(self, msg: Message) -> None:
        """Combine and summarize the frame's feature maps."""
        frame: WorldFrame = msg.payload
        if frame.feature_maps:
            weights = frame.weights or (1.0,) * len(frame.feature_maps)
            heatmap = combine_feature_maps(weights, frame.feature_maps, frame.frame_id)
        else:
            heatmap = Heatmap(grid=((0.0,),), source_frame=frame.frame_id)
        with self._lock:
            self.heatmaps[frame.frame_id] = heatmap

        summary = summarize_heatmap(
            heatmap,
            activation_threshold=self.activation_threshold,
            max_regions=self.max_regions,
            logger=self.logger,
        )
        self.publish(Topic.HEATMAP_SUMMARY, summary)


class ClassifierNode(Node):
    """
    Joins caption and heatmap summary per frame, classifies the rendered
    prompt and publishes the answer on `llm/classification`.
    """

    name = CLASSIFIER
    # a caption that failed upstream is not sent to the model
    requires_caption = True

    # pylint: disable=too-many-arguments,too-many-positional-arguments
    def __init__(
        self,
        bus: MessageBus,
        clock: Clock,
        responses: Mapping[str, str],
        remote: RemoteClient | None = None,
        logger: Logger | None = None,
    ):
        super().__init__(bus, clock, logger)
        self.responses = responses
        self.remote = remote
        self._captions: Dict[int, Caption] = {}
        self._summaries: Dict[int, HeatmapSummary] = {}
        self._lock = threading.Lock()

    @property
    def ready(self) -> bool:
        """Whether the classifier accepts inputs."""
        return self.started

    def start(self) -> None:
        self.bus.subscribe(Topic.BLIP_CAPTION, self.on_caption)
        self.bus.subscribe(Topic.HEATMAP_SUMMARY, self.on_summary)
        super().start()

    def on_caption(self, msg: Message) -> None:
        """Store a caption and classify when its summary is there."""
        caption: Caption = msg.payload
        with self._lock:
            self._captions[caption.source_frame] = caption
        self._try_classify(caption.source_frame)

    def on_summary(self, msg: Message) -> None:
        """Store a summary and classify when its caption is there."""
        summary: HeatmapSummary = msg.payload
        with self._lock:
            self._summaries[summary.source_frame] = summary
        self._try_classify(summary.source_frame)

    def _try_classify(self, frame_id: int) -> None:
        with self._lock:
            if frame_id not in self._captions or frame_id not in self._summaries:
                return
            caption = self._captions.pop(frame_id)
            summary = self._summaries.pop(frame_id)
        self.publish(Topic.LLM_CLASSIFICATION, self.classify(caption, summary))

    def _ask(self, ctx: PromptContext) -> Tuple[str, int, int]:
        """Raw answer with network and processing microseconds."""
        if self.remote is None:
            return scripted_classify(ctx, self.responses, logger=self.logger), 0, 0
        reply = self.remote.classify(ctx)
        return reply.raw, to_us(reply.t_network_s), to_us(reply.t_processing_s)

    def classify(self, caption: Caption, summary: HeatmapSummary) -> ClassifierOutput:
        """
        Classify one caption/summary pair.

        Backend failures and ungrammatical answers become outputs without a
        parsed classification.
        """
        ctx = render_prompt(caption, summary)
        if caption.error is not None and self.requires_caption:
            return ClassifierOutput(
                frame_id=caption.source_frame,
                raw="",
                error=f"caption failed: {caption.error}",
            )
        try:
            raw, network_us, processing_us = self._ask(ctx)
        except (RemoteTimeout, RemoteProtocolError) as e:
            if self.logger:
                self.logger.warning("Frame %d not classified: %s", caption.source_frame, e)
            return ClassifierOutput(
                frame_id=caption.source_frame,
                raw="",
                error=str(e),
                network_us=self.remote.failure_us(e) if self.remote is not None else 0,
            )

        parsed: ParsedClassification | None = None
        error = None
        try:
            parsed = parse_response(raw)
        except UnparsedResponse as e:
            error = e.reason
            if self.logger:
                self.logger.warning("Frame %d: %s", caption.source_frame, e)
        return ClassifierOutput(
            frame_id=caption.source_frame,
            raw=raw,
            parsed=parsed,
            error=error,
            network_us=network_us,
            processing_us=processing_us,
        )


class PassThroughClassifier(ClassifierNode):
    """Stands in for the classifier while anomaly detection is off: always Clear."""

    requires_caption = False

    def _ask(self, ctx: PromptContext) -> Tuple[str, int, int]:
        return f"CLEAR: {ctx.caption} RESUME", 0, 0
