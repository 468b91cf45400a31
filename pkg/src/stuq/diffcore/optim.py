"""First-order optimizers with global-norm gradient clipping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from stuq.core.enums import OptimizerKind
from stuq.core.errors import ConfigError, ShapeError

from .base import DiffValue

logger = logging.getLogger(__name__)


@dataclass
class OptimizerState:
    """Optimizer hyperparameters plus per-parameter moment buffers (adam only)."""
    kind: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = 1e-2
    clip_norm: Optional[float] = 5.0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.kind, str):
            self.kind = OptimizerKind(self.kind)
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise ConfigError(f"clip_norm must be positive or None, got {self.clip_norm}")


def global_norm(gradients: Mapping[str, np.ndarray]) -> float:
    """L2 norm of all gradients taken as one vector."""
    return float(np.sqrt(sum(float(np.sum(g * g)) for g in gradients.values())))


def clip_gradients(
    gradients: Mapping[str, np.ndarray], clip_norm: Optional[float]
) -> dict[str, np.ndarray]:
    """Rescale gradients so their global norm is at most ``clip_norm``."""
    if clip_norm is None:
        return dict(gradients)
    norm = global_norm(gradients)
    if norm <= clip_norm:
        return dict(gradients)
    scale = clip_norm / norm
    return {name: g * scale for name, g in gradients.items()}


def step(
    state: OptimizerState,
    parameters: Mapping[str, DiffValue],
    gradients: Mapping[str, np.ndarray],
) -> Mapping[str, DiffValue]:
    """Apply one update in place and return the parameters."""
    for name, value in parameters.items():
        if name not in gradients:
            raise ShapeError(f"Missing gradient for parameter {name}")
        if np.shape(gradients[name]) != value.data.shape:
            raise ShapeError(
                f"Gradient shape {np.shape(gradients[name])} does not match "
                f"parameter {name} shape {value.data.shape}"
            )

    clipped = clip_gradients({name: gradients[name] for name in parameters}, state.clip_norm)
    state.step_count += 1
    lr = state.learning_rate

    if state.kind == OptimizerKind.SGD:
        for name, value in parameters.items():
            value.data = value.data - lr * clipped[name]
        return parameters

    t = state.step_count
    for name, value in parameters.items():
        g = clipped[name]
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None:
            m = np.zeros_like(value.data)
            v = np.zeros_like(value.data)
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.first_moment[name] = m
        state.second_moment[name] = v
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        value.data = value.data - lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return parameters
