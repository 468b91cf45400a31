"""Reverse-mode differentiation and optimization substrate."""

from . import ops
from .base import DiffValue, Primitive, Shape, as_value
from .gradcheck import finite_difference_check
from .optim import OptimizerState, clip_gradients, global_norm, step
from .primitives import PRIMITIVES, build_default_registry
from .registry import PrimitiveRegistry
from .tape import Tape, active_tape, apply, backward, no_tape, record

__all__ = [
    "DiffValue",
    "OptimizerState",
    "PRIMITIVES",
    "Primitive",
    "PrimitiveRegistry",
    "Shape",
    "Tape",
    "active_tape",
    "apply",
    "as_value",
    "backward",
    "build_default_registry",
    "clip_gradients",
    "finite_difference_check",
    "global_norm",
    "no_tape",
    "ops",
    "record",
    "step",
]
