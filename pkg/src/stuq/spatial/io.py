"""CSV readers and writers for matrices and station sets."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from stuq.core.errors import ParseError, ValidationError

from .graph import SpatialGraph
from .interpolation import StationSet

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _check_field_counts(path: Path) -> int:
    """Reject rows whose field count differs from the header's; return that count."""
    with path.open() as handle:
        header = handle.readline()
        if not header.strip():
            raise ParseError("Missing header row", line=1)
        width = header.count(",") + 1
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            fields = line.count(",") + 1
            if fields != width:
                raise ParseError(f"Expected {width} fields, found {fields}", line=lineno)
    return width


def read_numeric_csv(
    path: PathLike,
    text_columns: Sequence[str] = (),
    allow_missing: bool = False,
) -> pd.DataFrame:
    """Read a headed CSV whose cells are numeric except ``text_columns``.

    Empty cells become NaN when ``allow_missing`` is set and are an error
    otherwise. Errors carry the 1-based file line number.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"File not found: {path}")
    _check_field_counts(path)
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pd.errors.ParserError as e:
        raise ParseError(str(e)) from e

    frame = pd.DataFrame(index=raw.index)
    for column in raw.columns:
        cells = raw[column].fillna("").str.strip()
        if column in text_columns:
            frame[column] = cells
            continue
        numbers = pd.to_numeric(cells, errors="coerce")
        empty = cells == ""
        bad = numbers.isna() & ~empty
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise ParseError(
                f"Non-numeric value {cells.iloc[row]!r} in column {column}", line=row + 2
            )
        if empty.any() and not allow_missing:
            row = int(np.flatnonzero(empty.to_numpy())[0])
            raise ParseError(f"Missing value in column {column}", line=row + 2)
        frame[column] = numbers.astype(np.float64)
    return frame


def read_matrix_csv(path: PathLike, expected_nodes: Optional[int] = None) -> tuple[list[str], np.ndarray]:
    """Header of P node ids followed by P rows of P numbers."""
    frame = read_numeric_csv(path)
    ids = [str(c) for c in frame.columns]
    matrix = frame.to_numpy(dtype=np.float64)
    if matrix.shape[0] != len(ids):
        raise ParseError(
            f"Expected {len(ids)} matrix rows to match the header, found {matrix.shape[0]}",
            line=min(matrix.shape[0], len(ids)) + 2,
        )
    if expected_nodes is not None and len(ids) != expected_nodes:
        raise ParseError(f"Matrix has {len(ids)} nodes, expected P = {expected_nodes}", line=1)
    return ids, matrix


def read_adjacency_csv(path: PathLike, expected_nodes: Optional[int] = None) -> SpatialGraph:
    _, matrix = read_matrix_csv(path, expected_nodes)
    return SpatialGraph(matrix)


def write_matrix_csv(path: PathLike, matrix: np.ndarray, ids: Optional[Sequence[str]] = None) -> Path:
    path = Path(path)
    matrix = np.asarray(matrix, dtype=np.float64)
    ids = list(ids) if ids is not None else [str(i) for i in range(matrix.shape[0])]
    pd.DataFrame(matrix, columns=ids).to_csv(path, index=False, float_format="%.17g")
    return path


def read_station_csv(path: PathLike) -> StationSet:
    """Columns ``id, x, y`` then one column per feature."""
    frame = read_numeric_csv(path, text_columns=("id",))
    missing = [c for c in ("id", "x", "y") if c not in frame.columns]
    if missing:
        raise ParseError(f"Station file lacks columns {missing}", line=1)
    value_columns = [c for c in frame.columns if c not in ("id", "x", "y")]
    if not value_columns:
        raise ParseError("Station file has no value columns", line=1)
    logger.debug(f"Read {len(frame)} stations with {len(value_columns)} features from {path}")
    return StationSet(
        positions=frame[["x", "y"]].to_numpy(dtype=np.float64),
        values=frame[value_columns].to_numpy(dtype=np.float64),
    )
