"""
Parser for the constrained classifier response grammar:

    [ws] (HAZARDOUS|CONFLICT|CLEAR) ':' description (REPORT|AVOID|RESUME) [rest]

Tokens are case-insensitive; the class and directive must form one of the
three legal pairs.
"""

from __future__ import annotations

import re

from pydantic import ValidationError

from ..core.models import AnomalyClass, Directive
from .models import ParsedClassification

_CLASS_TOKEN = re.compile(
    r"^\s*(?:['\"]\s*)?(HAZARDOUS|CONFLICT|CLEAR)\s*:(.*)$", re.IGNORECASE | re.DOTALL
)
_DIRECTIVE_TOKEN = re.compile(r"\b(REPORT|AVOID|RESUME)\b", re.IGNORECASE)
_QUOTES = "'\""
_STRIP = " \t\r\n" + _QUOTES


def _strip_joiner(text: str) -> str:
    """
    Drop what separates the description from the directive, as in the quoted
    form the prompt itself uses: 'HAZARDOUS: ...' and 'REPORT'.
    """
    text = text.rstrip()
    if text.endswith(tuple(_QUOTES)):
        text = text[:-1].rstrip()
    if len(text) > 3 and text[-3:].lower() == "and" and text[-4].isspace():
        text = text[:-3]
    return text.strip(_STRIP)


_CLASSES = {
    "hazardous": AnomalyClass.HAZARDOUS,
    "conflict": AnomalyClass.CONFLICT,
    "clear": AnomalyClass.CLEAR,
}
_DIRECTIVES = {
    "report": Directive.REPORT,
    "avoid": Directive.AVOID,
    "resume": Directive.RESUME,
}


class UnparsedResponse(Exception):
    """Raised when a response does not match the grammar."""

    def __init__(self, raw: str, reason: str):
        super().__init__(f"{reason}: {raw[:200]!r}")
        self.raw = raw
        self.reason = reason


def parse_response(raw: str) -> ParsedClassification:
    """
    Parse a raw classifier answer.

    The directive is the last directive token of the answer; the description
    is the text between the class token and that directive.

    Args:
        raw (str): Raw model text.

    Returns:
        ParsedClassification: Class, description and directive.

    Raises:
        UnparsedResponse: If the text does not match the grammar or the
            class/directive pair is not legal.
    """
    if not isinstance(raw, str):
        raise UnparsedResponse(str(raw), "response is not text")

    head = _CLASS_TOKEN.match(raw)
    if head is None:
        raise UnparsedResponse(raw, "missing class token")

    body = head.group(2)
    directives = list(_DIRECTIVE_TOKEN.finditer(body))
    if not directives:
        raise UnparsedResponse(raw, "missing directive token")
    last = directives[-1]

    description = _strip_joiner(body[: last.start()])
    try:
        return ParsedClassification(
            anomaly_class=_CLASSES[head.group(1).lower()],
            description=description,
            directive=_DIRECTIVES[last.group(1).lower()],
        )
    except ValidationError as e:
        raise UnparsedResponse(raw, "illegal class/directive pairing") from e
