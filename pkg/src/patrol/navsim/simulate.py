"""
Tick-stepped corridor run producing navigation metrics.

The robot moves one cell per tick along its plan. Zones flagged by the
detector are seen `sight_radius` cells ahead and routed around before
contact. Any other zone is only noticed on contact: the robot stops, waits
and then sidesteps it.
"""

from __future__ import annotations

from logging import Logger
from typing import Collection, Dict, Set

from ..core.models import ScenarioInvalid
from .models import AnomalyZone, Blocked, Cell, GridWorld, NavConfig, NavMetrics, Path
from .planner import NoPath, manhattan_to_zone, plan_path, replan_on_anomaly


class _Run:
    """Mutable stepping state of one simulation."""

    # pylint: disable=too-many-instance-attributes
    def __init__(self, world: GridWorld, path: Path):
        self.world = world
        self.path = path
        self.pos: Cell = world.start
        self.known: Set[str] = set()
        self.avoided: Set[Cell] = set()
        self.moving = False
        self.ticks = 0
        self.moves = 0
        self.stops = 0
        self.replans = 0
        self.detected = 0
        self.blocked = False

    def stop(self) -> None:
        if self.moving and self.pos != self.world.goal:
            self.stops += 1
        self.moving = False

    def avoid(self, zone: AnomalyZone, logger: Logger | None) -> None:
        """Mark a zone as known and route around it."""
        self.known.add(zone.zone_id)
        result = replan_on_anomaly(self.world, self.path, zone, avoid=self.avoided)
        self.avoided.update(zone.cells)
        if isinstance(result, Blocked):
            if logger:
                logger.warning("Route blocked at %s: %s", result.at, result.reason)
            self.stop()
            self.blocked = True
            return
        if result != tuple(self.path):
            self.replans += 1
        self.path = result


def simulate_run(
    world: GridWorld,
    config: NavConfig | None = None,
    ad_enabled: bool = True,
    detected_zones: Collection[str] | None = None,
    logger: Logger | None = None,
) -> NavMetrics:
    """
    Step a robot from start to goal and measure the run.

    Args:
        world (GridWorld): World with its anomaly zones.
        config (NavConfig, optional): Stepping parameters.
        ad_enabled (bool): Whether anomaly detection is running.
        detected_zones (Collection[str], optional): Zones the detector flags;
            every zone when omitted.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        NavMetrics: Trajectory, time, detections (None when AD is off),
            sudden stops.

    Raises:
        ScenarioInvalid: If the goal is unreachable from the start, a detected
            zone is unknown or the run exceeds `max_ticks`.
    """
    config = config or NavConfig()
    zone_ids = [z.zone_id for z in world.zones]
    flagged = set(zone_ids if detected_zones is None else detected_zones)
    if not flagged.issubset(zone_ids):
        unknown = sorted(flagged - set(zone_ids))
        raise ScenarioInvalid(f"unknown zones detected: {unknown}")
    if not ad_enabled:
        flagged = set()

    try:
        run = _Run(world, plan_path(world, world.start, world.goal))
    except NoPath as e:
        raise ScenarioInvalid(f"goal unreachable: {e}") from e

    zone_at: Dict[Cell, AnomalyZone] = {c: z for z in world.zones for c in z.cells}
    max_ticks = config.max_ticks or 4 * world.width * world.height

    while run.pos != world.goal and not run.blocked:
        if run.ticks >= max_ticks:
            raise ScenarioInvalid(f"goal not reached within {max_ticks} ticks")

        for zone in world.zones:
            if zone.zone_id in run.known or zone.zone_id not in flagged:
                continue
            if manhattan_to_zone(run.pos, zone) <= config.sight_radius:
                run.detected += 1
                if logger:
                    logger.info("Zone %s sighted from %s", zone.zone_id, run.pos)
                run.avoid(zone, logger)
                if run.blocked:
                    break
        if run.blocked:
            break

        nxt = run.path[1]
        contact = zone_at.get(nxt)
        if contact is not None and contact.zone_id not in run.known:
            if logger:
                logger.info("Contact with zone %s at %s", contact.zone_id, nxt)
            run.stop()
            run.ticks += config.wait_ticks
            run.avoid(contact, logger)
            continue

        run.pos = nxt
        run.path = run.path[1:]
        run.moves += 1
        run.ticks += 1
        run.moving = True

    return NavMetrics(
        trajectory_m=run.moves * world.cell_size_m,
        time_s=run.ticks * config.tick_s,
        anomalies_detected=run.detected if ad_enabled else None,
        sudden_stops=run.stops,
        replans=run.replans,
        reached_goal=run.pos == world.goal,
    )
