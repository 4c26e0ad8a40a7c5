"""
Per-anomaly archive: the frame, its heatmap and the anomaly report, saved
under a shared timestamped prefix.
"""

from __future__ import annotations

import os
from logging import Logger
from typing import List, NamedTuple, Tuple

import numpy as np

from ..core.models import AnomalyRecord, WorldFrame
from ..saliency.heatmap import Heatmap
from .flows_utils import to_canonical_json

PGM_MAX = 255
_SCALE_COMMENT = "# scale "


class ArchiveError(Exception):
    """Raised when archive files cannot be written or read."""


class ArchivePaths(NamedTuple):
    """Files written for one anomaly."""

    frame: str
    heatmap: str
    report: str


def archive_prefix(record: AnomalyRecord) -> str:
    """`<virtual timestamp>-<frame id>`, unique per frame within a run."""
    return f"{record.captured_at:010.3f}-{record.frame_id}"


def write_pgm(heatmap: Heatmap, file_path: str) -> None:
    """
    Write a heatmap as a plain (P2) PGM, max-normalized to 0-255.

    The normalization scale is kept in a comment line so the grid can be
    recovered within 1/255 of the maximum per cell.
    """
    grid = heatmap.to_array()
    scale = float(grid.max()) if grid.size else 0.0
    if scale > 0:
        pixels = np.rint(grid / scale * PGM_MAX).astype(np.int64)
    else:
        pixels = np.zeros(grid.shape, dtype=np.int64)

    rows, cols = grid.shape
    lines = ["P2", f"{_SCALE_COMMENT}{scale!r}", f"{cols} {rows}", str(PGM_MAX)]
    lines.extend(" ".join(str(v) for v in row) for row in pixels)
    with open(file_path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")


def read_pgm(file_path: str) -> Heatmap:
    """
    Read a heatmap written by `write_pgm`, denormalized with its scale.

    Raises:
        ArchiveError: If the file is not a plain PGM.
    """
    try:
        with open(file_path, "r", encoding="ascii") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ArchiveError(f"Cannot read {file_path}") from e

    scale = 1.0
    tokens: List[str] = []
    for line in lines:
        if line.startswith(_SCALE_COMMENT):
            scale = float(line[len(_SCALE_COMMENT) :])
        elif not line.startswith("#"):
            tokens.extend(line.split())

    if not tokens or tokens[0] != "P2":
        raise ArchiveError(f"{file_path} is not a plain PGM")
    try:
        cols, rows, max_value = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = np.array([int(v) for v in tokens[4:]], dtype=np.float64)
        pixels = values.reshape(rows, cols)
    except (IndexError, ValueError) as e:
        raise ArchiveError(f"{file_path} has a malformed PGM body") from e

    grid = pixels / max_value * scale
    return Heatmap(grid=tuple(tuple(float(v) for v in row) for row in grid))


def cmd_archive(
    record: AnomalyRecord,
    heatmap: Heatmap | None,
    frame: WorldFrame,
    out_dir: str,
    logger: Logger | None = None,
) -> ArchivePaths:
    """
    Save the frame, heatmap and report of one anomaly.

    Args:
        record (AnomalyRecord): Anomaly report.
        heatmap (Heatmap, optional): Saliency of the frame; a zero pixel if missing.
        frame (WorldFrame): Captured frame.
        out_dir (str): Archive directory, created if needed.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        ArchivePaths: The three written files.

    Raises:
        ArchiveError: If a file cannot be written.
    """
    prefix = os.path.join(out_dir, archive_prefix(record))
    paths = ArchivePaths(
        frame=f"{prefix}.frame.json",
        heatmap=f"{prefix}.heatmap.pgm",
        report=f"{prefix}.report.json",
    )
    if heatmap is None:
        heatmap = Heatmap(grid=((0.0,),), source_frame=frame.frame_id)
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(paths.frame, "w", encoding="utf-8") as f:
            f.write(to_canonical_json(frame))
        write_pgm(heatmap, paths.heatmap)
        with open(paths.report, "w", encoding="utf-8") as f:
            f.write(to_canonical_json(record))
    except OSError as e:
        raise ArchiveError(f"Cannot archive frame {record.frame_id} in {out_dir}") from e

    if logger:
        logger.info("Archived frame %d as %s.*", record.frame_id, prefix)
    return paths


def archive_run(
    ticks: Tuple[Tuple[AnomalyRecord, Heatmap | None, WorldFrame], ...],
    out_dir: str,
    logger: Logger | None = None,
) -> List[ArchivePaths]:
    """Archive every (record, heatmap, frame) triple in order."""
    return [
        cmd_archive(record, heatmap, frame, out_dir, logger=logger)
        for record, heatmap, frame in ticks
    ]
