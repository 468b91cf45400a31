"""Interval extraction from samples and the interval score metric."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from stuq.core.errors import ShapeError, ValidationError

TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IntervalSpec:
    """A (1 - rho) interval [lower, upper]."""
    rho: float
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValidationError(f"rho must lie in (0, 1), got {self.rho}")
        if self.upper < self.lower:
            raise ValidationError(f"upper {self.upper} is below lower {self.lower}")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass
class SampleBatch:
    """Draws z_1..z_N of one scalar."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.values.size < 1:
            raise ValidationError("Sample batch is empty")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("Sample batch contains non-finite values")

    def __len__(self) -> int:
        return self.values.size

    def sorted(self) -> np.ndarray:
        return np.sort(self.values)


def order_statistic_ranks(count: int, rho: float) -> tuple[int, int]:
    """1-indexed ranks (⌈ρN/2⌉, N - ⌊ρN/2⌋) of the lower and upper bound."""
    if count < 2:
        raise ValidationError(f"Need at least 2 samples for an interval, got {count}")
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    half = rho * count / 2.0
    nearest = round(half)
    if abs(half - nearest) < TIE_TOLERANCE:
        half = float(nearest)
    return max(1, math.ceil(half)), count - math.floor(half)


def empirical_interval(samples, rho: float) -> IntervalSpec:
    """Order-statistic interval l = z_⌈ρN/2⌉, u = z_{N-⌊ρN/2⌋}."""
    batch = samples if isinstance(samples, SampleBatch) else SampleBatch(samples)
    low, high = order_statistic_ranks(len(batch), rho)
    ordered = batch.sorted()
    return IntervalSpec(rho, float(ordered[low - 1]), float(ordered[high - 1]))


def empirical_bounds(samples: np.ndarray, rho: float, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise ``empirical_interval`` across ``axis`` of a sample array."""
    samples = np.asarray(samples, dtype=np.float64)
    low, high = order_statistic_ranks(samples.shape[axis], rho)
    ordered = np.sort(samples, axis=axis)
    return np.take(ordered, low - 1, axis=axis), np.take(ordered, high - 1, axis=axis)


def mis_values(upper, lower, observations, rho: float) -> np.ndarray:
    """Per-instance interval score."""
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    upper = np.asarray(upper, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    z = np.asarray(observations, dtype=np.float64)
    penalty = 2.0 / rho
    return (
        (upper - lower)
        + penalty * (z - upper) * (z > upper)
        + penalty * (lower - z) * (z < lower)
    )


def mis_metric(upper, lower, observations, rho: float, mask: Optional[np.ndarray] = None) -> float:
    """Mean interval score over instances; bounds may be scalars or per-instance."""
    z = np.asarray(observations, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    for name, bound in (("upper", upper), ("lower", lower)):
        if bound.ndim and bound.shape != z.shape:
            raise ShapeError(f"{name} has shape {bound.shape}, observations {z.shape}")
    values = mis_values(upper, lower, z, rho)
    values = np.broadcast_to(values, z.shape)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != z.shape:
            raise ShapeError(f"mask has shape {mask.shape}, observations {z.shape}")
        if not mask.any():
            raise ValidationError("Every observation is masked")
        return float(np.mean(values[mask]))
    return float(np.mean(values))


def brute_force_mis_minimizer(samples, rho: float) -> IntervalSpec:
    """Exhaustive minimizer of the sample interval score over order-statistic pairs.

    Candidates are every (l, u) = (z_(i), z_(j)) with i <= j. An infinite bound
    never wins since its score is infinite. Ties within a relative tolerance go
    to the lower u, then the lower l.
    """
    batch = samples if isinstance(samples, SampleBatch) else SampleBatch(samples)
    if len(batch) < 2:
        raise ValidationError(f"Need at least 2 samples for an interval, got {len(batch)}")
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    z = batch.sorted()
    count = z.size
    penalty = 2.0 / rho

    # Score separates into a part depending on u and a part depending on l.
    upper_part = z + penalty * np.mean(np.maximum(z[None, :] - z[:, None], 0.0), axis=1)
    lower_part = -z + penalty * np.mean(np.maximum(z[:, None] - z[None, :], 0.0), axis=1)
    scores = lower_part[:, None] + upper_part[None, :]
    valid = np.triu(np.ones((count, count), dtype=bool))
    scores = np.where(valid, scores, np.inf)

    best = scores.min()
    tolerance = TIE_TOLERANCE * max(1.0, abs(best))
    rows, cols = np.nonzero(scores <= best + tolerance)
    order = np.lexsort((rows, cols))
    i, j = rows[order[0]], cols[order[0]]
    return IntervalSpec(rho, float(z[i]), float(z[j]))
