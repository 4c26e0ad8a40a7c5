# models do not have public methods
# pylint: disable=too-few-public-methods

"""Grid world, anomaly zones and navigation metrics."""

from __future__ import annotations

from typing import FrozenSet, Tuple

import numpy as np
from pydantic import Field, model_validator

from ..core.models import FrozenModel

Cell = Tuple[int, int]
Path = Tuple[Cell, ...]

DEFAULT_CELL_SIZE_M = 0.25


class AnomalyZone(FrozenModel):
    """Cells covered by one anomaly and its hazard class."""

    zone_id: str
    hazard_class: str
    cells: Tuple[Cell, ...] = Field(min_length=1)


class GridWorld(FrozenModel):
    """
    4-connected occupancy grid. Cells are (x, y) with x across the width and
    y along the height.
    """

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    cell_size_m: float = Field(default=DEFAULT_CELL_SIZE_M, gt=0)
    occupied: Tuple[Cell, ...] = ()
    zones: Tuple[AnomalyZone, ...] = ()
    start: Cell = (0, 0)
    goal: Cell = (0, 0)

    @model_validator(mode="after")
    def _check_cells(self) -> "GridWorld":
        for cell in self.occupied + tuple(c for z in self.zones for c in z.cells):
            if not self.in_bounds(cell):
                raise ValueError(f"cell {cell} outside {self.width}x{self.height}")
        blocked = set(self.occupied)
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise ValueError(f"{name} {cell} outside {self.width}x{self.height}")
            if cell in blocked:
                raise ValueError(f"{name} {cell} is occupied")
        if self.start in self.zone_cells():
            raise ValueError(f"start {self.start} lies inside an anomaly zone")
        ids = [z.zone_id for z in self.zones]
        if len(ids) != len(set(ids)):
            raise ValueError("anomaly zone ids must be unique")
        return self

    def in_bounds(self, cell: Cell) -> bool:
        """Whether a cell lies on the grid."""
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def zone_cells(self) -> FrozenSet[Cell]:
        """Union of all anomaly zone cells."""
        return frozenset(c for z in self.zones for c in z.cells)

    def zone(self, zone_id: str) -> AnomalyZone:
        """Zone by id."""
        for zone in self.zones:
            if zone.zone_id == zone_id:
                return zone
        raise KeyError(zone_id)

    def occupancy(self) -> np.ndarray:
        """Boolean occupancy grid indexed [y, x]."""
        grid = np.zeros((self.height, self.width), dtype=bool)
        for x, y in self.occupied:
            grid[y, x] = True
        return grid


class Blocked(FrozenModel):
    """No route exists; the robot has to stop safely."""

    at: Cell
    reason: str = ""


class NavConfig(FrozenModel):
    """Stepping parameters of the navigation simulation."""

    sight_radius: int = Field(default=4, ge=1)
    wait_ticks: int = Field(default=2, ge=0)
    tick_s: float = Field(default=1.0, gt=0)
    max_ticks: int | None = Field(default=None, gt=0)


class NavMetrics(FrozenModel):
    """Trajectory length, travel time, anomalies and sudden stops of one run."""

    trajectory_m: float = Field(ge=0)
    time_s: float = Field(ge=0)
    anomalies_detected: int | None = Field(default=None, ge=0)
    sudden_stops: int = Field(default=0, ge=0)
    replans: int = Field(default=0, ge=0)
    reached_goal: bool = True
