"""Anomaly detection prompt sent to the classifier."""

from __future__ import annotations

from ..saliency.heatmap import HeatmapSummary
from .models import Caption, PromptContext

PROMPT_TEMPLATE = (
    "You are a mobile robot that monitors your environment for potential hazards "
    "and conflicts. The image caption is: '{caption}'. The heatmap analysis shows: "
    "'{heatmap_summary}'. Analyze this information and classify any detected "
    "anomalies. If you detect a hazard (e.g., dangerous objects, environmental "
    "threats, safety violations), respond with 'HAZARDOUS: [brief description]' "
    "and 'REPORT'. If you detect a conflict (e.g., navigation conflicts, "
    "operational disruptions, rule violations), respond with 'CONFLICT: [brief "
    "description]' and 'AVOID'. If no anomalies are detected, respond with "
    "'CLEAR: [brief description of normal conditions]' and 'RESUME'."
)


def render_prompt(caption: Caption, summary: HeatmapSummary) -> PromptContext:
    """
    Fill the prompt template with a caption and a heatmap summary.

    Args:
        caption (Caption): Caption of the frame.
        summary (HeatmapSummary): Summary of the frame's heatmap.

    Returns:
        PromptContext: Inputs and the rendered prompt.
    """
    rendered = PROMPT_TEMPLATE.format(
        caption=caption.text, heatmap_summary=summary.text
    )
    return PromptContext(
        caption=caption.text,
        heatmap_summary=summary.text,
        rendered=rendered,
        source_frame=caption.source_frame,
    )
