"""
Responders executing mitigation actions.

Simulated sinks are the default; `WebhookSink` forwards calls and emails to a
real HTTP endpoint.
"""

from __future__ import annotations

import threading
from logging import Logger
from typing import Any, Dict, List, Tuple

import requests

from ..core.models import AnomalyRecord, MitigationAction
from .models import ActionLogEntry, Delivery, WebhookConfig


class SinkUnavailable(Exception):
    """Raised when a real sink cannot be reached."""


class SimulatedSinks:
    """
    In-memory responders: phone call, email, siren and spoken warnings.

    Safe to share between threads.
    """

    def __init__(self, logger: Logger | None = None):
        self.logger = logger
        self.siren_on = False
        self.calls: List[str] = []
        self.emails: List[str] = []
        self.spoken: List[str] = []
        self.log_lines: List[str] = []
        self._lock = threading.Lock()

    def call(self, message: str) -> Delivery:
        """Place a simulated phone call."""
        with self._lock:
            self.calls.append(message)
        if self.logger:
            self.logger.info("Simulated call: %s", message)
        return Delivery.SIMULATED_CALL

    def email(self, message: str) -> Delivery:
        """Send a simulated email."""
        with self._lock:
            self.emails.append(message)
        if self.logger:
            self.logger.info("Simulated email: %s", message)
        return Delivery.SIMULATED_EMAIL

    def siren(self, on: bool) -> Delivery:
        """Switch the siren."""
        with self._lock:
            self.siren_on = on
        if self.logger:
            self.logger.info("Siren %s", "on" if on else "off")
        return Delivery.SIREN_ON if on else Delivery.LOG_ONLY

    def say(self, message: str) -> Delivery:
        """Speak a warning (logged)."""
        with self._lock:
            self.spoken.append(message)
        if self.logger:
            self.logger.warning("Spoken warning: %s", message)
        return Delivery.LOG_ONLY

    def log(self, message: str) -> Delivery:
        """Record an action that has no external effect."""
        with self._lock:
            self.log_lines.append(message)
        if self.logger:
            self.logger.info("%s", message)
        return Delivery.LOG_ONLY


class WebhookSink(SimulatedSinks):
    """Sinks that POST calls and emails as JSON to a webhook."""

    def __init__(self, url: str, timeout_s: float = 5.0, logger: Logger | None = None):
        super().__init__(logger=logger)
        self.url = url
        self.timeout_s = timeout_s

    def _post(self, channel: str, message: str) -> Delivery:
        body: Dict[str, Any] = {"channel": channel, "message": message}
        try:
            response = requests.post(self.url, json=body, timeout=self.timeout_s)
            response.raise_for_status()
        except requests.RequestException as e:
            raise SinkUnavailable(f"Webhook {self.url} unreachable for {channel}") from e
        return Delivery.WEBHOOK

    def call(self, message: str) -> Delivery:
        super().call(message)
        return self._post("call", message)

    def email(self, message: str) -> Delivery:
        super().email(message)
        return self._post("email", message)


def make_sinks(
    webhook: WebhookConfig | None = None, logger: Logger | None = None
) -> SimulatedSinks:
    """Responders of a run: webhook-backed when one is configured, simulated otherwise."""
    if webhook is None:
        return SimulatedSinks(logger=logger)
    return WebhookSink(webhook.url, timeout_s=webhook.timeout_s, logger=logger)


def _describe(action: MitigationAction, record: AnomalyRecord) -> str:
    subject = record.description or str(record.anomaly_class)
    return f"{action}: {record.anomaly_class} '{subject}' at frame {record.frame_id}"


def execute_action(
    action: MitigationAction,
    sinks: SimulatedSinks,
    record: AnomalyRecord,
    at: float,
) -> ActionLogEntry:
    """
    Execute one mitigation action.

    Args:
        action (MitigationAction): Action to run.
        sinks (SimulatedSinks): Responders to deliver through.
        record (AnomalyRecord): Record that triggered the action.
        at (float): Virtual time of execution in seconds.

    Returns:
        ActionLogEntry: Exactly one entry, with one delivery per sink reached.

    Raises:
        SinkUnavailable: If a real sink is configured and unreachable.
    """
    message = _describe(action, record)
    deliveries: Tuple[Delivery, ...]

    if action == MitigationAction.SIREN:
        deliveries = (sinks.siren(True),)
    elif action == MitigationAction.NOTIFY:
        deliveries = (sinks.call(message), sinks.email(message))
    elif action == MitigationAction.ALERT:
        deliveries = (sinks.call(message),)
    elif action == MitigationAction.WARN:
        deliveries = (sinks.say(f"Warning: {record.description or 'anomaly'} ahead"),)
    elif action == MitigationAction.RESUME:
        if sinks.siren_on:
            sinks.siren(False)
        deliveries = (sinks.log(message),)
    else:
        # Replan, Report, Avoid, SafeStop act on navigation and the archive
        deliveries = (sinks.log(message),)

    return ActionLogEntry(
        action=action,
        triggered_by=record.frame_id,
        at=at,
        deliveries=deliveries,
        message=message,
    )
