"""
Utility functions shared by the patrol flows: canonical JSON and output
directory handling.
"""

from __future__ import annotations

import json
import math
import os
import shutil
from logging import Logger
from typing import Any

from pydantic import BaseModel

FLOAT_DECIMALS = 3


def _round_floats(value: Any) -> Any:
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return round(value, FLOAT_DECIMALS)
    if isinstance(value, dict):
        return {str(k): _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def to_canonical_json(payload: BaseModel | Any) -> str:
    """
    Serialize a model or plain payload deterministically.

    Keys are sorted, indentation is 2 spaces and floats are rounded to 3
    decimals; infinities are written as the strings "inf" and "-inf".

    Args:
        payload (BaseModel | Any): Pydantic model or JSON-compatible value.

    Returns:
        str: Canonical JSON text ending with a newline.
    """
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(by_alias=True)
    return json.dumps(_round_floats(payload), sort_keys=True, indent=2) + "\n"


def write_canonical_json(
    payload: BaseModel | Any, file_path: str, logger: Logger | None = None
) -> str:
    """
    Write canonical JSON to a file, creating parent directories.

    Returns:
        str: The written path.
    """
    os.makedirs(os.path.dirname(os.path.abspath(file_path)), exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(to_canonical_json(payload))
    if logger:
        logger.debug("Wrote %s", file_path)
    return file_path


def clean_up_output_dir(output_dir: str, logger: Logger | None = None) -> None:
    """
    Clean up the output directory by removing all files and subdirectories.

    Args:
        output_dir (str): The path to the output directory to clean up.
        logger (Logger, optional): Logger for logging messages.
    """
    if os.path.exists(output_dir):
        if os.path.isfile(output_dir):
            os.remove(output_dir)
        elif os.path.isdir(output_dir):
            shutil.rmtree(output_dir)
    elif logger:
        logger.warning("The specified output path does not exist: %s", output_dir)
