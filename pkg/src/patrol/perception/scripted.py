"""
Deterministic caption and classification backends, the offline stand-ins for
the captioning and language models.
"""

from __future__ import annotations

from logging import Logger
from typing import Dict, Mapping

from ..core.models import Severity, WorldFrame
from .keywords import best_keyword
from .models import Backend, Caption, PromptContext

CAPTION_PREFIX = "a view of "
EMPTY_SCENE_PHRASE = "an empty scene"

DEFAULT_LEXICON: Dict[str, str] = {
    "hallway": "a hallway",
    "corridor": "an empty corridor",
    "lab": "a makerspace lab",
    "doorway": "an open doorway",
    "person": "a person walking",
    "chair": "a chair against the wall",
    "poster": "a printed poster on the wall",
    "spill": "a liquid spill on the floor",
    "obstruction": "a box obstruction blocking the path",
    "firearm": "a person holding a firearm",
    "fight": "people fighting",
}

_RESPONSE_SEVERITY = {
    "HAZARDOUS": Severity.HIGH,
    "CONFLICT": Severity.MEDIUM,
    "CLEAR": Severity.LOW,
}


class UnknownTag(Exception):
    """Raised when a scene tag has no lexicon phrase."""


def scripted_caption(
    frame: WorldFrame, lexicon: Mapping[str, str] | None = None
) -> Caption:
    """
    Caption a frame from its scene tags.

    Args:
        frame (WorldFrame): Frame to caption.
        lexicon (Mapping[str, str], optional): Phrase per tag, DEFAULT_LEXICON if omitted.

    Returns:
        Caption: "a view of " followed by the comma-joined phrases in tag order.

    Raises:
        UnknownTag: If a tag is missing from the lexicon.
    """
    lexicon = DEFAULT_LEXICON if lexicon is None else lexicon
    phrases = []
    for tag in frame.scene_tags:
        if tag not in lexicon:
            raise UnknownTag(f"frame {frame.frame_id}: no phrase for tag '{tag}'")
        phrases.append(lexicon[tag])

    body = ", ".join(phrases) if phrases else EMPTY_SCENE_PHRASE
    return Caption(
        text=CAPTION_PREFIX + body,
        source_frame=frame.frame_id,
        backend=Backend.SCRIPTED,
    )


def response_severity(response: str) -> Severity:
    """Severity implied by the class token a canned response starts with."""
    token = response.strip().split(":", 1)[0].upper()
    return _RESPONSE_SEVERITY.get(token, Severity.LOW)


def scripted_classify(
    ctx: PromptContext,
    rulebook: Mapping[str, str],
    logger: Logger | None = None,
) -> str:
    """
    Classify a prompt context by scanning its caption for rulebook keywords.

    Args:
        ctx (PromptContext): Rendered prompt context.
        rulebook (Mapping[str, str]): Canned grammar-conformant response per keyword.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        str: The winning keyword's response, or a CLEAR/RESUME answer.
    """
    if not rulebook:
        raise ValueError("rulebook must not be empty")

    ranks = {kw: response_severity(resp).rank for kw, resp in rulebook.items()}
    keyword = best_keyword(ctx.caption, ranks)
    if keyword is None:
        return f"CLEAR: {ctx.caption} RESUME"

    if logger:
        logger.debug("Frame %d matched keyword '%s'", ctx.source_frame, keyword)
    return rulebook[keyword]
