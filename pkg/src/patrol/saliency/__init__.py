"""Saliency heatmaps and their textual summaries."""

from .heatmap import (
    DEFAULT_ACTIVATION_THRESHOLD,
    DEFAULT_MAX_REGIONS,
    NO_REGIONS_TEXT,
    Heatmap,
    HeatmapSummary,
    SalientRegion,
    ShapeMismatch,
    combine_feature_maps,
    summarize_heatmap,
)

__all__ = [
    "DEFAULT_ACTIVATION_THRESHOLD",
    "DEFAULT_MAX_REGIONS",
    "NO_REGIONS_TEXT",
    "Heatmap",
    "HeatmapSummary",
    "SalientRegion",
    "ShapeMismatch",
    "combine_feature_maps",
    "summarize_heatmap",
]
