"""Monotone piecewise-linear spline quantile functions and their CRPS.

A spline head emits 11 raw numbers per predicted scalar, laid out as
``[intercept, raw_slope_1..5, raw_knot_1..5]``. Slopes pass through softplus
and knots are the running sum of the first five entries of
``softmax([0, raw_knot_1..5])``, which keeps them strictly increasing inside
(0, 1). The quantile function is

    Q(α) = intercept + Σ_j slope_j · max(0, α - knot_j)

and is flat at the intercept on [0, knot_1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from stuq.core.errors import ShapeError, ValidationError
from stuq.diffcore import DiffValue, no_tape, ops
from stuq.diffcore.base import as_value

SPLINE_PIECES = 5
SPLINE_WIDTH = 1 + 2 * SPLINE_PIECES

ArrayLike = Union[DiffValue, np.ndarray, float]


@dataclass
class SplineQuantileParams:
    """Raw (untransformed) spline parameters for one scalar."""
    intercept: float
    raw_slopes: np.ndarray
    raw_knots: np.ndarray

    def __post_init__(self):
        self.raw_slopes = np.asarray(self.raw_slopes, dtype=np.float64).reshape(-1)
        self.raw_knots = np.asarray(self.raw_knots, dtype=np.float64).reshape(-1)
        if self.raw_slopes.size != SPLINE_PIECES or self.raw_knots.size != SPLINE_PIECES:
            raise ShapeError(f"Spline needs {SPLINE_PIECES} slopes and {SPLINE_PIECES} knots")

    def to_vector(self) -> np.ndarray:
        return np.concatenate([[self.intercept], self.raw_slopes, self.raw_knots])

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "SplineQuantileParams":
        vector = np.asarray(vector, dtype=np.float64).reshape(-1)
        if vector.size != SPLINE_WIDTH:
            raise ShapeError(f"Spline vector must have {SPLINE_WIDTH} entries, got {vector.size}")
        return cls(vector[0], vector[1:1 + SPLINE_PIECES], vector[1 + SPLINE_PIECES:])


def spline_parts(params: ArrayLike) -> tuple[DiffValue, DiffValue, DiffValue]:
    """Split (..., 11) raw parameters into intercept (...), slopes and knots (..., 5)."""
    params = as_value(params)
    if params.data.shape[-1] != SPLINE_WIDTH:
        raise ShapeError(f"Spline parameters need last axis {SPLINE_WIDTH}, got {params.data.shape}")
    intercept = params[..., 0]
    slopes = ops.softplus(params[..., 1:1 + SPLINE_PIECES])
    raw_knots = params[..., 1 + SPLINE_PIECES:]
    anchor = ops.constant(np.zeros(params.data.shape[:-1] + (1,)))
    weights = ops.softmax(ops.concat([anchor, raw_knots], axis=-1), axis=-1)
    knots = ops.cumsum(weights[..., :SPLINE_PIECES], axis=-1)
    return intercept, slopes, knots


def _check_level(alpha) -> None:
    levels = np.asarray(alpha.data if isinstance(alpha, DiffValue) else alpha)
    if np.any(levels <= 0) or np.any(levels >= 1):
        raise ValidationError("Quantile level must lie in (0, 1)")


def quantile_from_parts(intercept, slopes, knots, alpha) -> DiffValue:
    """Evaluate Q at ``alpha`` (broadcast against the leading axes)."""
    alpha = as_value(alpha)
    hinge = ops.relu(ops.sub(ops.reshape(alpha, alpha.data.shape + (1,)), knots))
    return ops.add(intercept, ops.sum(ops.mul(slopes, hinge), axis=-1))


def spline_quantile_eval(params: ArrayLike, alpha) -> DiffValue:
    """Q(alpha) for raw spline parameters of shape (..., 11)."""
    _check_level(alpha)
    return quantile_from_parts(*spline_parts(params), alpha)


def spline_quantiles(params: np.ndarray, levels) -> np.ndarray:
    """Plain-array quantiles, stacked on a trailing axis, one per level."""
    with no_tape():
        intercept, slopes, knots = spline_parts(ops.constant(params))
        columns = []
        for level in np.atleast_1d(levels):
            _check_level(level)
            columns.append(quantile_from_parts(intercept, slopes, knots, float(level)).data)
    return np.stack(columns, axis=-1)


def crossing_level(intercept: np.ndarray, slopes: np.ndarray, knots: np.ndarray, y: np.ndarray) -> np.ndarray:
    """The level α* with Q(α*) = y, clipped to [0, 1]."""
    intercept = np.asarray(intercept, dtype=np.float64)
    y = np.broadcast_to(np.asarray(y, dtype=np.float64), intercept.shape)
    lead = intercept.shape
    breaks = np.concatenate([np.zeros(lead + (1,)), knots, np.ones(lead + (1,))], axis=-1)
    # Q at each breakpoint: flat to knot_1, then cumulative slope per segment.
    seg_slope = np.concatenate([np.zeros(lead + (1,)), np.cumsum(slopes, axis=-1)], axis=-1)
    seg_rise = seg_slope * np.diff(breaks, axis=-1)
    values = intercept[..., None] + np.concatenate(
        [np.zeros(lead + (1,)), np.cumsum(seg_rise, axis=-1)], axis=-1
    )

    below = np.sum(values <= y[..., None], axis=-1)
    segment = np.clip(below - 1, 0, SPLINE_PIECES)
    start = np.take_along_axis(breaks, segment[..., None], axis=-1)[..., 0]
    end = np.take_along_axis(breaks, segment[..., None] + 1, axis=-1)[..., 0]
    base = np.take_along_axis(values, segment[..., None], axis=-1)[..., 0]
    slope = np.take_along_axis(seg_slope, segment[..., None], axis=-1)[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        inside = np.where(slope > 0, start + (y - base) / slope, start)
    alpha = np.clip(inside, start, end)
    alpha = np.where(below == 0, 0.0, alpha)
    alpha = np.where(below == SPLINE_PIECES + 2, 1.0, alpha)
    return alpha


def crps_from_parts(intercept, slopes, knots, y) -> DiffValue:
    """Closed-form CRPS of a piecewise-linear quantile function against ``y``.

    CRPS = y - 2∫Q(α)α dα + 2∫_{α*}^1 (Q(α) - y) dα, with α* held constant.
    """
    intercept, slopes, knots = as_value(intercept), as_value(slopes), as_value(knots)
    y = as_value(y)
    alpha_star = crossing_level(intercept.data, slopes.data, knots.data, y.data)
    above = ops.constant(1.0 - alpha_star)

    cube = ops.mul(ops.square(knots), knots)
    moment = ops.add(
        ops.mul(intercept, 0.5),
        ops.sum(ops.mul(slopes, (1.0 / 3.0) - ops.mul(knots, 0.5) + ops.mul(cube, 1.0 / 6.0)), axis=-1),
    )
    tail_hinge = ops.relu(ops.sub(ops.constant(alpha_star[..., None]), knots))
    tail = ops.add(
        ops.mul(intercept, above),
        ops.sum(ops.mul(slopes, ops.square(1.0 - knots) - ops.square(tail_hinge)), axis=-1) * 0.5,
    )
    return y - ops.mul(moment, 2.0) + ops.mul(ops.sub(tail, ops.mul(y, above)), 2.0)


def crps_pwl(params: ArrayLike, y) -> DiffValue:
    """Elementwise CRPS for raw spline parameters (..., 11) and targets (...)."""
    return crps_from_parts(*spline_parts(params), y)
