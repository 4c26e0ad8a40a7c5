"""Run-time defaults read from Prefect Variables."""

from __future__ import annotations

import os
from functools import lru_cache

from prefect.variables import Variable

from ..bus.models import (
    DEFAULT_CAPTURE_INTERVAL_S,
    DEFAULT_QUEUE_SIZE,
    DEFAULT_T_MAX_S,
    BusMode,
)


@lru_cache(maxsize=1)
def get_output_dir() -> str:
    """Get the base output directory for patrol runs."""
    path = str(Variable.get("output_dir", default="output"))
    os.makedirs(path, exist_ok=True)
    return path


def _get_float(name: str, default: float) -> float:
    value = Variable.get(name, default=default)
    try:
        return float(value)  # type: ignore
    except (TypeError, ValueError) as e:
        raise ValueError(f"Invalid value for {name}: {value}. Must be a number.") from e


@lru_cache(maxsize=1)
def get_t_max_s() -> float:
    """Get the default end-to-end latency budget in seconds."""
    return _get_float("patrol_t_max_s", DEFAULT_T_MAX_S)


@lru_cache(maxsize=1)
def get_capture_interval_s() -> float:
    """Get the default periodic capture interval in seconds."""
    return _get_float("patrol_capture_interval_s", DEFAULT_CAPTURE_INTERVAL_S)


@lru_cache(maxsize=1)
def get_queue_size() -> int:
    """Get the per-subscriber queue bound of the bus."""
    value = Variable.get("patrol_queue_size", default=DEFAULT_QUEUE_SIZE)
    try:
        return int(value)  # type: ignore
    except (TypeError, ValueError) as e:
        raise ValueError(
            f"Invalid value for patrol_queue_size: {value}. Must be an integer."
        ) from e


@lru_cache(maxsize=1)
def get_bus_mode() -> BusMode:
    """Get the bus scheduler."""
    value = str(Variable.get("patrol_bus_mode", default=BusMode.DETERMINISTIC.value))
    try:
        return BusMode(value)
    except ValueError as e:
        raise ValueError(
            f"Invalid value for patrol_bus_mode: {value}. "
            f"Must be one of {[m.value for m in BusMode]}."
        ) from e
