"""Breadth-first path planning and anomaly-aware replanning."""

from __future__ import annotations

from collections import deque
from typing import Dict, Iterable, Sequence, Tuple

from .models import AnomalyZone, Blocked, Cell, GridWorld, Path

# x axis before y axis
_MOVES: Tuple[Cell, ...] = ((1, 0), (-1, 0), (0, 1), (0, -1))


class NoPath(Exception):
    """Raised when the goal cannot be reached from the start."""


def plan_path(
    world: GridWorld,
    start: Cell,
    goal: Cell,
    avoid: Iterable[Cell] = (),
) -> Path:
    """
    Shortest 4-connected path around occupied cells.

    Args:
        world (GridWorld): World to plan in.
        start (Cell): First cell of the path.
        goal (Cell): Last cell of the path.
        avoid (Iterable[Cell]): Extra cells treated as occupied.

    Returns:
        Path: Cells from start to goal inclusive; `len(path) - 1` moves.

    Raises:
        NoPath: If the goal is unreachable or either end is blocked.
    """
    blocked = set(world.occupied).union(avoid)
    for name, cell in (("start", start), ("goal", goal)):
        if not world.in_bounds(cell) or cell in blocked:
            raise NoPath(f"{name} {cell} is blocked or out of bounds")

    parents: Dict[Cell, Cell | None] = {start: None}
    frontier = deque([start])
    while frontier:
        cell = frontier.popleft()
        if cell == goal:
            break
        for dx, dy in _MOVES:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt in parents or nxt in blocked or not world.in_bounds(nxt):
                continue
            parents[nxt] = cell
            frontier.append(nxt)
    else:
        raise NoPath(f"no path from {start} to {goal}")

    path = [goal]
    while (parent := parents[path[-1]]) is not None:
        path.append(parent)
    return tuple(reversed(path))


def path_length_m(world: GridWorld, path: Sequence[Cell]) -> float:
    """Metric length of a path."""
    return max(0, len(path) - 1) * world.cell_size_m


def manhattan_to_zone(cell: Cell, zone: AnomalyZone) -> int:
    """Distance in moves from a cell to the nearest zone cell."""
    return min(abs(cell[0] - zx) + abs(cell[1] - zy) for zx, zy in zone.cells)


def replan_on_anomaly(
    world: GridWorld,
    current_path: Sequence[Cell],
    zone: AnomalyZone,
    avoid: Iterable[Cell] = (),
) -> Path | Blocked:
    """
    Route the rest of a path around an anomaly zone.

    Args:
        world (GridWorld): World to plan in.
        current_path (Sequence[Cell]): Remaining path, current cell first.
        zone (AnomalyZone): Zone to treat as occupied.
        avoid (Iterable[Cell]): Cells of zones avoided earlier.

    Returns:
        Path | Blocked: The unchanged remainder when it already misses the
            zone, a new path to the same goal, or Blocked when none exists.
    """
    if not current_path:
        raise ValueError("current path is empty")
    current, goal = current_path[0], current_path[-1]
    zone_cells = set(zone.cells)
    if current in zone_cells:
        raise ValueError(f"current cell {current} lies inside zone {zone.zone_id}")

    blocked = zone_cells.union(avoid)
    if not blocked.intersection(current_path):
        return tuple(current_path)

    try:
        return plan_path(world, current, goal, avoid=blocked)
    except NoPath as e:
        return Blocked(at=current, reason=f"zone {zone.zone_id}: {e}")
