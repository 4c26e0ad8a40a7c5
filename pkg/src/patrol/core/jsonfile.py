"""
JSON loading with line-precise validation errors.

Syntax errors report the decoder's line; schema errors are traced back to the
line where the offending value starts.
"""

from __future__ import annotations

import json
import re
from json.decoder import scanstring
from typing import Any, Dict, Tuple, TypeVar

from pydantic import TypeAdapter, ValidationError

T = TypeVar("T")
Path = Tuple[Any, ...]

_WHITESPACE = re.compile(r"[ \t\n\r]*")
_DECODER = json.JSONDecoder()


class JsonSchemaError(Exception):
    """Raised when a JSON document is malformed or violates its schema."""

    def __init__(self, message: str, line: int, path: str = ""):
        location = f"line {line}" + (f" ({path})" if path else "")
        super().__init__(f"{location}: {message}")
        self.line = line
        self.path = path
        self.message = message


def _skip(text: str, idx: int) -> int:
    match = _WHITESPACE.match(text, idx)
    return match.end() if match else idx


# pylint: disable=too-many-branches
def _index_values(text: str, idx: int, path: Path, out: Dict[Path, int]) -> int:
    """Record the start offset of every value under `path`; return its end."""
    idx = _skip(text, idx)
    out[path] = idx
    char = text[idx : idx + 1]

    if char == "{":
        idx = _skip(text, idx + 1)
        if text[idx] == "}":
            return idx + 1
        while True:
            idx = _skip(text, idx)
            key, idx = scanstring(text, idx + 1)
            idx = _skip(text, idx) + 1  # ':'
            idx = _skip(text, _index_values(text, idx, path + (key,), out))
            if text[idx] == ",":
                idx += 1
                continue
            return idx + 1

    if char == "[":
        idx = _skip(text, idx + 1)
        if text[idx] == "]":
            return idx + 1
        position = 0
        while True:
            idx = _skip(text, _index_values(text, idx, path + (position,), out))
            position += 1
            if text[idx] == ",":
                idx += 1
                continue
            return idx + 1

    _, end = _DECODER.raw_decode(text, idx)
    return int(end)


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


def _locate(text: str, loc: Tuple[Any, ...]) -> Tuple[int, str]:
    offsets: Dict[Path, int] = {}
    _index_values(text, 0, (), offsets)

    path: Path = ()
    for part in loc:
        if path + (part,) in offsets:
            path = path + (part,)
    return _line_of(text, offsets.get(path, 0)), ".".join(str(p) for p in path)


def parse_json_text(text: str, adapter: TypeAdapter[T]) -> T:
    """
    Parse and validate a JSON document.

    Args:
        text (str): JSON source.
        adapter (TypeAdapter): Adapter of the expected type.

    Returns:
        The validated object.

    Raises:
        JsonSchemaError: With the line of the first problem.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise JsonSchemaError(e.msg, e.lineno) from e

    try:
        return adapter.validate_python(data)
    except ValidationError as e:
        first = e.errors()[0]
        line, path = _locate(text, tuple(first["loc"]))
        raise JsonSchemaError(first["msg"], line, path) from e


def load_json_file(file_path: str, adapter: TypeAdapter[T]) -> T:
    """
    Read and validate a JSON file.

    Raises:
        JsonSchemaError: If the file is malformed or invalid.
        OSError: If the file cannot be read.
    """
    with open(file_path, "r", encoding="utf-8") as f:
        return parse_json_text(f.read(), adapter)
