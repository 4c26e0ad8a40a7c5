"""
Heatmap generation H = ReLU(sum_k alpha_k A_k) over supplied feature maps and
the textual `heatmap/summary` payload derived from it.
"""

from __future__ import annotations

from logging import Logger
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import Field, field_validator
from scipy import ndimage

from ..core.models import FrozenModel, Grid

DEFAULT_ACTIVATION_THRESHOLD = 0.5
DEFAULT_MAX_REGIONS = 3
NO_REGIONS_TEXT = "no salient regions"

# 4-connectivity
_CROSS = ndimage.generate_binary_structure(2, 1)


class ShapeMismatch(Exception):
    """Raised when weights and feature maps cannot be combined."""


class Heatmap(FrozenModel):
    """Rectified saliency grid for one frame."""

    grid: Grid
    source_frame: int = 0

    @field_validator("grid")
    @classmethod
    def _check_non_negative(cls, grid: Grid) -> Grid:
        if any(cell < 0 for row in grid for cell in row):
            raise ValueError("heatmap cells must be non-negative")
        return grid

    def to_array(self) -> np.ndarray:
        """Grid as a float64 array."""
        return np.asarray(self.grid, dtype=np.float64).reshape(self.shape)

    @property
    def shape(self) -> Tuple[int, int]:
        """(rows, cols)."""
        return (len(self.grid), len(self.grid[0]) if self.grid else 0)


class SalientRegion(FrozenModel):
    """Connected component of super-threshold cells."""

    centroid_row: float
    centroid_col: float
    area_fraction: float = Field(gt=0, le=1)
    mean_activation: float
    cell_count: int


class HeatmapSummary(FrozenModel):
    """Summary injected into the prompt's heatmap slot."""

    source_frame: int = 0
    regions: Tuple[SalientRegion, ...] = ()
    total_regions: int = 0
    text: str = Field(min_length=1)


def _as_grid(array: np.ndarray) -> Grid:
    return tuple(tuple(float(cell) for cell in row) for row in array)


def combine_feature_maps(
    weights: Sequence[float],
    maps: Sequence[Grid] | Sequence[np.ndarray],
    source_frame: int = 0,
) -> Heatmap:
    """
    Combine weighted feature maps into a rectified heatmap.

    Args:
        weights (Sequence[float]): One weight per feature map.
        maps (Sequence[Grid]): Feature maps of identical shape.
        source_frame (int): Frame the maps belong to.

    Returns:
        Heatmap: out[i, j] = max(0, sum_k weights[k] * maps[k][i, j]).

    Raises:
        ShapeMismatch: If counts differ, no map is given or shapes differ.
    """
    if len(weights) != len(maps):
        raise ShapeMismatch(f"{len(weights)} weights for {len(maps)} feature maps")
    if not maps:
        raise ShapeMismatch("at least one feature map is required")

    arrays = [np.asarray(m, dtype=np.float64) for m in maps]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1 or arrays[0].ndim != 2:  # pylint: disable=magic-value-comparison
        raise ShapeMismatch(f"feature maps must share one 2D shape, got {shapes}")

    stacked = np.stack(arrays)
    alpha = np.asarray(weights, dtype=np.float64)
    combined = np.tensordot(alpha, stacked, axes=1)
    return Heatmap(grid=_as_grid(np.maximum(combined, 0.0)), source_frame=source_frame)


def _components(mask: np.ndarray) -> List[np.ndarray]:
    """Cells of each 4-connected component of a boolean mask, labelled row-major."""
    labels, count = ndimage.label(mask, structure=_CROSS)
    return [np.argwhere(labels == label) for label in range(1, count + 1)]


def _fmt(value: float) -> str:
    return f"{round(value, 1):g}"


def render_summary_text(regions: Sequence[SalientRegion], total: int) -> str:
    """Render the fixed one-line summary template."""
    if not regions:
        return NO_REGIONS_TEXT
    strongest = regions[0]
    noun = "region" if total == 1 else "regions"
    return (
        f"{total} salient {noun}; strongest at "
        f"({_fmt(strongest.centroid_row)},{_fmt(strongest.centroid_col)}) "
        f"covering {strongest.area_fraction * 100:.1f}% of frame"
    )


def summarize_heatmap(
    h: Heatmap,
    activation_threshold: float = DEFAULT_ACTIVATION_THRESHOLD,
    max_regions: int = DEFAULT_MAX_REGIONS,
    logger: Logger | None = None,
) -> HeatmapSummary:
    """
    Summarize a heatmap as its strongest connected salient regions.

    Args:
        h (Heatmap): Heatmap to summarize.
        activation_threshold (float): Fraction of the maximum a cell must reach.
        max_regions (int): Number of regions to keep.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        HeatmapSummary: Regions ordered by mean activation and the rendered text.
    """
    if not 0 < activation_threshold <= 1:
        raise ValueError(f"threshold must lie in (0, 1], got {activation_threshold}")
    if max_regions < 1:
        raise ValueError(f"max_regions must be >= 1, got {max_regions}")

    array = h.to_array()
    peak = float(array.max()) if array.size else 0.0
    if peak <= 0:
        return HeatmapSummary(source_frame=h.source_frame, text=NO_REGIONS_TEXT)

    mask = array >= activation_threshold * peak
    regions = []
    for cells in _components(mask):
        centroid = cells.mean(axis=0)
        regions.append(
            SalientRegion(
                centroid_row=float(centroid[0]),
                centroid_col=float(centroid[1]),
                area_fraction=len(cells) / array.size,
                mean_activation=float(array[cells[:, 0], cells[:, 1]].mean()),
                cell_count=len(cells),
            )
        )
    regions.sort(key=lambda g: (-g.mean_activation, g.centroid_row, g.centroid_col))
    kept = tuple(regions[:max_regions])

    if logger:
        logger.debug(
            "Frame %d: %d salient regions, kept %d",
            h.source_frame,
            len(regions),
            len(kept),
        )
    return HeatmapSummary(
        source_frame=h.source_frame,
        regions=kept,
        total_regions=len(regions),
        text=render_summary_text(kept, len(regions)),
    )
