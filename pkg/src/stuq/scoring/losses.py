"""Differentiable training losses.

Every loss takes an optional ``weights`` array broadcastable to the targets.
It folds the missing-value mask and per-feature weights together; masked
entries carry weight 0 and never contribute.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from stuq.core.errors import ValidationError
from stuq.diffcore import DiffValue, ops
from stuq.diffcore.base import as_value

from .spline import crps_pwl

QUANTILE_LEVELS = (0.025, 0.5, 0.975)


def _reduce(values: DiffValue, weights: Optional[np.ndarray]) -> DiffValue:
    if weights is None:
        return ops.mean(values)
    return ops.weighted_mean(values, weights)


def pinball_loss(y, f, level: float) -> DiffValue:
    """Elementwise (y - f)(level - 1{y < f})."""
    if not 0.0 < level < 1.0:
        raise ValidationError(f"Quantile level must lie in (0, 1), got {level}")
    y = as_value(y)
    diff = ops.sub(y, f)
    return ops.mul(diff, ops.sub(level, ops.less(y, f)))


def quantile_loss(
    y,
    heads: DiffValue,
    levels: Sequence[float] = QUANTILE_LEVELS,
    weights: Optional[np.ndarray] = None,
) -> DiffValue:
    """Sum of pinball losses over the heads (last axis), averaged over targets."""
    heads = as_value(heads)
    if heads.data.shape[-1] != len(levels):
        raise ValidationError(f"Expected {len(levels)} heads, got {heads.data.shape[-1]}")
    total = None
    for i, level in enumerate(levels):
        term = pinball_loss(y, heads[..., i], level)
        total = term if total is None else ops.add(total, term)
    return _reduce(total, weights)


def mis_elementwise(y, upper, lower, rho: float) -> DiffValue:
    """(u - l) + (2/ρ)(y - u)1{y > u} + (2/ρ)(l - y)1{y < l}."""
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    y = as_value(y)
    penalty = 2.0 / rho
    above = ops.mul(ops.sub(y, upper), ops.greater(y, upper))
    below = ops.mul(ops.sub(lower, y), ops.less(y, lower))
    return ops.sub(upper, lower) + ops.mul(above, penalty) + ops.mul(below, penalty)


def mis_training_loss(
    y,
    upper,
    lower,
    point,
    rho: float,
    mae_weight: float = 1.0,
    weights: Optional[np.ndarray] = None,
) -> DiffValue:
    """Interval score of (l, u) plus ``mae_weight`` |y - f|, averaged."""
    values = mis_elementwise(y, upper, lower, rho)
    if mae_weight:
        values = ops.add(values, ops.mul(ops.abs(ops.sub(y, point)), mae_weight))
    return _reduce(values, weights)


def mae_loss(y, f, weights: Optional[np.ndarray] = None) -> DiffValue:
    return _reduce(ops.abs(ops.sub(y, f)), weights)


def mse_loss(y, f, weights: Optional[np.ndarray] = None) -> DiffValue:
    return _reduce(ops.square(ops.sub(y, f)), weights)


def crps_loss(y, params, weights: Optional[np.ndarray] = None) -> DiffValue:
    """Mean closed-form CRPS of spline heads (..., 11)."""
    return _reduce(crps_pwl(params, y), weights)
