"""Differentiable operations on DiffValues."""

from __future__ import annotations

import builtins
from typing import Any, Optional, Sequence

import numpy as np

from .base import DiffValue, as_value
from .tape import apply


def parameter(data: Any, name: Optional[str] = None) -> DiffValue:
    """Create a trainable leaf."""
    return DiffValue(np.array(data, dtype=np.float64), requires_grad=True, name=name)


def constant(data: Any) -> DiffValue:
    """Create a value that never receives gradients."""
    return DiffValue(np.array(data, dtype=np.float64))


def add(a, b) -> DiffValue:
    return apply("add", a, b)


def sub(a, b) -> DiffValue:
    return apply("sub", a, b)


def mul(a, b) -> DiffValue:
    return apply("mul", a, b)


def div(a, b) -> DiffValue:
    return apply("div", a, b)


def neg(a) -> DiffValue:
    return apply("neg", a)


def matmul(a, b) -> DiffValue:
    return apply("matmul", a, b)


def conv2d(x, w, padding: str = "zeros") -> DiffValue:
    return apply("conv2d", x, w, padding=padding)


def sigmoid(x) -> DiffValue:
    return apply("sigmoid", x)


def tanh(x) -> DiffValue:
    return apply("tanh", x)


def relu(x) -> DiffValue:
    return apply("relu", x)


def abs(x) -> DiffValue:
    return apply("abs", x)


def softplus(x) -> DiffValue:
    return apply("softplus", x)


def exp(x) -> DiffValue:
    return apply("exp", x)


def square(x) -> DiffValue:
    return apply("square", x)


def softmax(x, axis: int = -1) -> DiffValue:
    return apply("softmax", x, axis=axis)


def cumsum(x, axis: int = -1) -> DiffValue:
    return apply("cumsum", x, axis=axis)


def maximum(a, b) -> DiffValue:
    return apply("maximum", a, b)


def greater(a, b) -> DiffValue:
    """1 where a > b, else 0; constant for differentiation."""
    return apply("indicator", a, b, op="gt")


def less(a, b) -> DiffValue:
    """1 where a < b, else 0; constant for differentiation."""
    return apply("indicator", a, b, op="lt")


def sum(x, axis=None, keepdims: bool = False) -> DiffValue:
    return apply("sum", x, axis=axis, keepdims=keepdims)


def mean(x, axis=None, keepdims: bool = False) -> DiffValue:
    return apply("mean", x, axis=axis, keepdims=keepdims)


def concat(values: Sequence[Any], axis: int = -1) -> DiffValue:
    return apply("concat", *values, axis=axis)


def stack(values: Sequence[Any], axis: int = 0) -> DiffValue:
    return apply("stack", *values, axis=axis)


def reshape(x, shape: Sequence[int]) -> DiffValue:
    return apply("reshape", x, shape=tuple(shape))


def transpose(x, axes: Optional[Sequence[int]] = None) -> DiffValue:
    return apply("transpose", x, axes=None if axes is None else tuple(axes))


def getitem(x, index) -> DiffValue:
    return apply("getitem", x, index=index)


def weighted_mean(x, weights) -> DiffValue:
    """Sum of ``x * weights`` over the sum of ``weights`` (weights are constants)."""
    weights = as_value(weights)
    total = float(np.sum(np.broadcast_to(weights.data, np.shape(as_value(x).data))))
    return sum(mul(x, weights)) / builtins.max(total, 1e-12)
