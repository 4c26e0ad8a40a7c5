"""Bundled worlds: the 2.5 m x 14 m hallway and its obstruction variants."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .models import AnomalyZone, GridWorld

HALLWAY_WIDTH = 10
HALLWAY_HEIGHT = 56


def hallway_world(zones: Sequence[AnomalyZone] = ()) -> GridWorld:
    """
    Empty 10 x 56 hallway of 0.25 m cells, driven along its centre line.

    Args:
        zones (Sequence[AnomalyZone]): Anomaly zones to place.

    Returns:
        GridWorld: Start (5, 0), goal (5, 55).
    """
    centre = HALLWAY_WIDTH // 2
    return GridWorld(
        width=HALLWAY_WIDTH,
        height=HALLWAY_HEIGHT,
        start=(centre, 0),
        goal=(centre, HALLWAY_HEIGHT - 1),
        zones=tuple(zones),
    )


def obstruction_variant(seed: int) -> GridWorld:
    """
    Hallway with one seeded box obstruction across the centre line.

    The obstruction is 2 to 4 cells wide and 1 to 3 cells deep, placed in the
    middle half of the hallway and always leaving a side passage.
    """
    rng = np.random.default_rng(seed)
    centre = HALLWAY_WIDTH // 2

    width = int(rng.integers(2, 5))
    depth = int(rng.integers(1, 4))
    # the box always covers the centre column
    lowest, highest = centre - width + 1, min(centre, HALLWAY_WIDTH - width)
    x0 = int(rng.integers(max(0, lowest), highest + 1))
    y0 = int(rng.integers(HALLWAY_HEIGHT // 4, 3 * HALLWAY_HEIGHT // 4 - depth))

    cells = tuple(
        (x, y) for y in range(y0, y0 + depth) for x in range(x0, x0 + width)
    )
    return hallway_world(
        zones=(
            AnomalyZone(
                zone_id=f"obstruction-{seed}", hazard_class="obstruction", cells=cells
            ),
        )
    )
