"""Plot-ready CSV tables (data only, no rendering)."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from stuq.core.enums import PlotKind
from stuq.core.errors import ValidationError

from .artifacts import ForecastArtifact, atomic_write_bytes, read_forecast
from .results_store import ResultsRecord, read_record
from .sweep import SweepTable

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

BAND_COLUMNS = ("time", "location_id", "truth", "mean", "lower", "upper", "method")
SWEEP_COLUMNS = ("samples", "seed", "mis")
COVERAGE_COLUMNS = ("method", "horizon", "coverage", "width", "rho")


def forecast_band_frame(artifact: ForecastArtifact, window: int = -1, feature: int = 0) -> pd.DataFrame:
    """One row per (horizon step, location) of a single test window."""
    mean = artifact["mean"]
    count, horizon, nodes, features = mean.shape
    if not -count <= window < count:
        raise ValidationError(f"Window {window} outside the {count} test windows")
    if not 0 <= feature < features:
        raise ValidationError(f"Feature {feature} outside the {features} features")
    window %= count

    def column(name: str) -> np.ndarray:
        if name not in artifact.arrays:
            return np.full(horizon * nodes, np.nan)
        return artifact[name][window, :, :, feature].reshape(-1)

    times = artifact.target_times[window] if artifact.target_times else [str(h + 1) for h in range(horizon)]
    node_ids = artifact.node_ids or [str(p) for p in range(nodes)]
    return pd.DataFrame({
        "time": np.repeat(np.asarray(times, dtype=object), nodes),
        "location_id": np.tile(np.asarray(node_ids, dtype=object), horizon),
        "truth": column("truth"),
        "mean": column("mean"),
        "lower": column("lower"),
        "upper": column("upper"),
        "method": artifact.method,
    }, columns=list(BAND_COLUMNS))


def sweep_frame(tables: Sequence[SweepTable]) -> pd.DataFrame:
    """Per-seed rows followed by one ``mean`` row per sample count, per table."""
    rows = []
    for table in tables:
        rows.extend({"samples": c, "seed": s, "mis": v} for c, s, v in table.rows)
        rows.extend({"samples": c, "seed": "mean", "mis": v} for c, v in table.means().items())
    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))


def coverage_width_frame(records: Sequence[ResultsRecord]) -> pd.DataFrame:
    """Per-horizon coverage and width; both empty for methods without intervals."""
    rows = [
        {"method": r.method, "horizon": h, "coverage": b.coverage, "width": b.width, "rho": r.rho}
        for r in records
        for h, b in r.horizons
    ]
    return pd.DataFrame(rows, columns=list(COVERAGE_COLUMNS))


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    return atomic_write_bytes(path, frame.to_csv(index=False, na_rep="", float_format="%.17g").encode())


def emit_plot_data(
    sources: Sequence[PathLike],
    kind: Union[str, PlotKind],
    out_path: PathLike,
    window: int = -1,
    feature: int = 0,
) -> Path:
    """Build one CSV of ``kind`` from run directories (or sweep tables) and write it.

    Forecast bands need each run's raw-forecast artifact; coverage tables read
    each run's record; sweep tables read ``sweep.json`` files.
    """
    kind = PlotKind(kind)
    if not sources:
        raise ValidationError("No result sources given")
    if kind == PlotKind.FORECAST_BAND:
        frame = pd.concat(
            [forecast_band_frame(read_forecast(s), window, feature) for s in sources], ignore_index=True
        )
    elif kind == PlotKind.SWEEP:
        frame = sweep_frame([SweepTable.load(s) for s in sources])
    else:
        frame = coverage_width_frame([read_record(s) for s in sources])
    path = write_csv(frame, out_path)
    logger.info(f"Wrote {len(frame)} {kind.value} rows to {path}")
    return path
