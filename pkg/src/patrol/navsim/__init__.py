"""Corridor grid simulator: planning, replanning and navigation metrics."""

from .models import (
    AnomalyZone,
    Blocked,
    Cell,
    GridWorld,
    NavConfig,
    NavMetrics,
    Path,
)
from .planner import (
    NoPath,
    manhattan_to_zone,
    path_length_m,
    plan_path,
    replan_on_anomaly,
)
from .simulate import simulate_run
from .worlds import hallway_world, obstruction_variant

__all__ = [
    "AnomalyZone",
    "Blocked",
    "Cell",
    "GridWorld",
    "NavConfig",
    "NavMetrics",
    "NoPath",
    "Path",
    "hallway_world",
    "manhattan_to_zone",
    "obstruction_variant",
    "path_length_m",
    "plan_path",
    "replan_on_anomaly",
    "simulate_run",
]
