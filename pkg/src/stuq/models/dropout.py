"""Monte Carlo dropout views of a trained forecaster."""

from __future__ import annotations

import logging

import numpy as np

from stuq.core.errors import ValidationError
from stuq.diffcore import ops

from .base import RecurrentForecaster, is_bias

logger = logging.getLogger(__name__)


def dropout_masks(model: RecurrentForecaster, rate: float, seed: int) -> dict[str, np.ndarray]:
    """Bernoulli keep-masks for every weight tensor, drawn in parameter-name order."""
    if not 0.0 <= rate < 1.0:
        raise ValidationError(f"Dropout rate must lie in [0, 1), got {rate}")
    rng = np.random.default_rng(seed)
    masks = {}
    for name in sorted(model.parameters):
        if is_bias(name):
            continue
        shape = model.parameters[name].data.shape
        masks[name] = (rng.random(shape) >= rate).astype(np.float64)
    return masks


def apply_dropout_masks(model: RecurrentForecaster, rate: float, seed: int) -> RecurrentForecaster:
    """A view whose weights are zeroed independently with probability ``rate``.

    Biases are kept and nothing is rescaled. The base parameters are untouched.
    """
    masks = dropout_masks(model, rate, seed)
    parameters = {}
    for name, value in model.parameters.items():
        if name in masks:
            parameters[name] = ops.constant(value.data * masks[name])
        else:
            parameters[name] = ops.constant(value.data)
    return model.with_parameters(parameters)


def dropped_fraction(model: RecurrentForecaster, view: RecurrentForecaster) -> float:
    """Share of weights that are zero in ``view`` but not in ``model``."""
    dropped = total = 0
    for name, value in model.parameters.items():
        if is_bias(name):
            continue
        base = value.data != 0
        dropped += int(np.sum(base & (view.parameters[name].data == 0)))
        total += int(np.sum(base))
    return dropped / max(total, 1)
