"""
In-process topic bus.

Two schedulers share one publish path:
    deterministic  subscribers run on the publishing thread, FIFO over all
                   pending deliveries
    concurrent     one worker thread per subscriber behind a bounded queue;
                   a full queue blocks the publisher

Both produce the same per-topic sequences.
"""

from __future__ import annotations

import threading
from collections import deque
from logging import Logger
from queue import Queue
from typing import Callable, Deque, Dict, Iterable, List, Tuple

from .models import DEFAULT_QUEUE_SIZE, BusMode, Message, Topic

Subscriber = Callable[[Message], None]


class UnknownTopic(Exception):
    """Raised when publishing or subscribing to an unregistered topic."""


class BusClosed(Exception):
    """Raised when publishing on a closed bus."""


class _DeliveryWorker(threading.Thread):
    """Thread worker delivering one subscriber's queue in order."""

    def __init__(
        self,
        queue: "Queue[Message | None]",
        callback: Subscriber,
        name: str,
        logger: Logger | None = None,
    ):
        super().__init__(daemon=True)
        self.queue = queue
        self.callback = callback
        self.logger = logger

        self.delivered_count = 0
        self.exception: Exception | None = None
        self.name = f"_DeliveryWorker-{name}-{id(self)}"

    def run(self) -> None:
        """Deliver messages until the stop sentinel arrives."""
        while True:
            msg = self.queue.get()
            try:
                if msg is None:
                    return
                # after a failure the queue is still drained so producers never block
                if self.exception is None:
                    self.callback(msg)
                    self.delivered_count += 1
            except Exception as e:  # pylint: disable=broad-exception-caught
                if self.logger:
                    self.logger.error(
                        "Delivery of %s #%d failed in %s: %s",
                        msg.topic if msg else "?",
                        msg.seq if msg else -1,
                        self.name,
                        e,
                    )
                self.exception = e
            finally:
                self.queue.task_done()


class _Subscription:
    """One subscriber of one topic."""

    # pylint: disable=too-few-public-methods
    def __init__(self, topic: Topic, callback: Subscriber, queue_size: int):
        self.topic = topic
        self.callback = callback
        self.queue: "Queue[Message | None]" = Queue(maxsize=queue_size)
        self.worker: _DeliveryWorker | None = None


class MessageBus:
    """
    Publish/subscribe fabric with per-topic sequence numbers.

    Every subscriber receives each message of its topic exactly once, in
    sequence order.
    """

    # pylint: disable=too-many-instance-attributes
    def __init__(
        self,
        topics: Iterable[Topic] = tuple(Topic),
        mode: BusMode = BusMode.DETERMINISTIC,
        queue_size: int = DEFAULT_QUEUE_SIZE,
        logger: Logger | None = None,
    ):
        self.mode = mode
        self.queue_size = queue_size
        self.logger = logger

        self._subscriptions: Dict[Topic, List[_Subscription]] = {t: [] for t in topics}
        self._locks = {t: threading.Lock() for t in self._subscriptions}
        self._next_seq = {t: 0 for t in self._subscriptions}
        self._published: List[Message] = []

        self._pending: Deque[Tuple[_Subscription, Message]] = deque()
        self._drain_lock = threading.Lock()
        self._drain_owner: int | None = None
        self._closed = False

    @property
    def topics(self) -> Tuple[Topic, ...]:
        """Registered topics."""
        return tuple(self._subscriptions)

    @property
    def published(self) -> Tuple[Message, ...]:
        """Every published message, with its assigned seq."""
        return tuple(self._published)

    def _check_topic(self, topic: Topic) -> None:
        if topic not in self._subscriptions:
            raise UnknownTopic(f"topic '{topic}' is not registered")

    def subscribe(self, topic: Topic, callback: Subscriber) -> None:
        """
        Register a subscriber.

        Raises:
            UnknownTopic: If the topic is not registered.
        """
        self._check_topic(topic)
        sub = _Subscription(topic, callback, self.queue_size)
        if self.mode == BusMode.CONCURRENT:
            sub.worker = _DeliveryWorker(
                sub.queue, callback, name=str(topic), logger=self.logger
            )
            sub.worker.start()
        with self._locks[topic]:
            self._subscriptions[topic].append(sub)

    def publish(self, msg: Message) -> int:
        """
        Publish a message to all current subscribers of its topic.

        Args:
            msg (Message): Message to publish; its seq is assigned here.

        Returns:
            int: The assigned per-topic sequence number.

        Raises:
            UnknownTopic: If the topic is not registered.
            BusClosed: If the bus was closed.
        """
        if self._closed:
            raise BusClosed("bus is closed")
        self._check_topic(msg.topic)

        with self._locks[msg.topic]:
            seq = self._next_seq[msg.topic]
            self._next_seq[msg.topic] += 1
            stamped = msg.model_copy(update={"seq": seq})
            self._published.append(stamped)
            subscribers = list(self._subscriptions[msg.topic])
            if self.mode == BusMode.CONCURRENT:
                for sub in subscribers:
                    sub.queue.put(stamped)
            else:
                self._pending.extend((sub, stamped) for sub in subscribers)

        if self.logger:
            self.logger.debug(
                "Published %s #%d to %d subscribers", msg.topic, seq, len(subscribers)
            )
        if self.mode == BusMode.DETERMINISTIC:
            self._drain()
        return seq

    def _drain(self) -> None:
        # nested publishes from subscribers only enqueue
        if self._drain_owner == threading.get_ident():
            return
        with self._drain_lock:
            self._drain_owner = threading.get_ident()
            try:
                while self._pending:
                    sub, msg = self._pending.popleft()
                    sub.callback(msg)
            finally:
                self._drain_owner = None

    def _workers(self) -> List[_DeliveryWorker]:
        return [
            sub.worker
            for subs in self._subscriptions.values()
            for sub in subs
            if sub.worker is not None
        ]

    def raise_failures(self) -> None:
        """Re-raise the first exception a delivery worker stored."""
        for worker in self._workers():
            if worker.exception:
                raise worker.exception

    def join(self) -> None:
        """
        Wait until every queued message has been delivered.

        Raises:
            Exception: The first exception raised by a subscriber.
        """
        for subs in list(self._subscriptions.values()):
            for sub in subs:
                if sub.worker is not None:
                    sub.queue.join()
        self.raise_failures()

    def close(self) -> None:
        """
        Deliver what is queued, then stop the workers.

        Raises:
            Exception: The first exception raised by a subscriber.
        """
        if self._closed:
            return
        self._closed = True
        for worker in self._workers():
            worker.queue.put(None)
        for worker in self._workers():
            worker.join()
        if self.logger:
            self.logger.info("Bus closed after %d messages", len(self._published))
        self.raise_failures()
