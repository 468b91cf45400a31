"""Evaluation metric bundles."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from stuq.core.errors import ShapeError, ValidationError

from .intervals import mis_values

METRIC_NAMES = ("mae", "rmse", "mis", "width", "coverage", "crossing_rate")


@dataclass
class MetricBundle:
    """Point and interval metrics over one set of positions.

    Interval fields are None for forecasts without bounds.
    """
    mae: float
    rmse: float
    mis: Optional[float] = None
    width: Optional[float] = None
    coverage: Optional[float] = None
    crossing_rate: Optional[float] = None
    count: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MetricBundle":
        return cls(**{k: data.get(k) for k in (*METRIC_NAMES, "count")})


def summary_metrics(
    mean: np.ndarray,
    truth: np.ndarray,
    rho: float,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
    mask: Optional[np.ndarray] = None,
    clamp_crossing: bool = False,
) -> MetricBundle:
    """MAE, RMSE, MIS, mean width, coverage and crossing rate over unmasked entries.

    The crossing rate is measured before the optional clamp u <- max(u, l).
    """
    mean = np.asarray(mean, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if mean.shape != truth.shape:
        raise ShapeError(f"Forecast shape {mean.shape} does not match truth {truth.shape}")
    if (lower is None) != (upper is None):
        raise ValidationError("lower and upper must be given together")

    valid = np.isfinite(truth)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != truth.shape:
            raise ShapeError(f"Mask shape {mask.shape} does not match truth {truth.shape}")
        valid &= mask
    if not valid.any():
        raise ValidationError("Every entry is masked")

    errors = mean[valid] - truth[valid]
    bundle = MetricBundle(
        mae=float(np.mean(np.abs(errors))),
        rmse=float(np.sqrt(np.mean(errors ** 2))),
        count=int(valid.sum()),
    )
    if lower is None:
        return bundle

    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if lower.shape != truth.shape or upper.shape != truth.shape:
        raise ShapeError(f"Bounds {lower.shape}/{upper.shape} do not match truth {truth.shape}")
    lo, hi, z = lower[valid], upper[valid], truth[valid]
    bundle.crossing_rate = float(np.mean(hi < lo))
    if clamp_crossing:
        hi = np.maximum(hi, lo)
    bundle.mis = float(np.mean(mis_values(hi, lo, z, rho)))
    bundle.width = float(np.mean(hi - lo))
    bundle.coverage = float(np.mean((z >= lo) & (z <= hi)))
    return bundle
