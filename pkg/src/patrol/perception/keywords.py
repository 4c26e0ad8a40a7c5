"""Keyword scanning shared by the scripted classifier and the rulebook."""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Mapping, Pattern

# whole words, allowing simple inflections ("firearms", "fighting")
_SUFFIXES = r"(?:s|es|ing|ed)?"


@lru_cache(maxsize=256)
def _keyword_pattern(keyword: str) -> Pattern[str]:
    return re.compile(rf"\b{re.escape(keyword.lower())}{_SUFFIXES}\b", re.IGNORECASE)


def contains_keyword(text: str, keyword: str) -> bool:
    """Case-insensitive whole-word match of a keyword in text."""
    return _keyword_pattern(keyword).search(text) is not None


def best_keyword(text: str, ranks: Mapping[str, int]) -> str | None:
    """
    Pick the winning keyword found in a text.

    Precedence: higher rank (severity), then longer keyword, then
    lexicographic order.

    Args:
        text (str): Text to scan.
        ranks (Mapping[str, int]): Severity rank per keyword.

    Returns:
        str | None: Winning keyword, or None when nothing matches.
    """
    found = [kw for kw in ranks if contains_keyword(text, kw)]
    if not found:
        return None
    return min(found, key=lambda kw: (-ranks[kw], -len(kw), kw))
