"""Virtual and wall clocks, both counting integer microseconds."""

from __future__ import annotations

import threading
import time
from typing import Protocol

US_PER_S = 1_000_000


def to_us(seconds: float) -> int:
    """Convert seconds to whole microseconds (rounded)."""
    return int(round(seconds * US_PER_S))


def to_s(microseconds: int) -> float:
    """Convert microseconds to seconds."""
    return microseconds / US_PER_S


class Clock(Protocol):
    """Time source used for latency accounting."""

    def now_us(self) -> int:
        """Current time in microseconds."""
        ...  # pylint: disable=unnecessary-ellipsis


class VirtualClock:
    """
    Deterministic simulated clock.

    Time only moves when advanced explicitly, so latencies replayed from a
    scenario are reproduced bit for bit.
    """

    def __init__(self, start_us: int = 0):
        self._now_us = start_us
        self._lock = threading.Lock()

    def now_us(self) -> int:
        """Current virtual time in microseconds."""
        return self._now_us

    def now_s(self) -> float:
        """Current virtual time in seconds."""
        return to_s(self._now_us)

    def advance_us(self, delta_us: int) -> int:
        """
        Move the clock forward.

        Args:
            delta_us (int): Non-negative step in microseconds.

        Returns:
            int: The new time.
        """
        if delta_us < 0:
            raise ValueError(f"virtual time cannot go backwards ({delta_us} us)")
        with self._lock:
            self._now_us += delta_us
            return self._now_us

    def advance_to_us(self, target_us: int) -> int:
        """Move the clock to `target_us` if it lies in the future."""
        with self._lock:
            self._now_us = max(self._now_us, target_us)
            return self._now_us


class WallClock:
    """Monotonic wall clock, used only by the remote adapter."""

    def now_us(self) -> int:
        """Monotonic time in microseconds."""
        return time.perf_counter_ns() // 1000
