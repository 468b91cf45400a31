"""Primitive implementations: forward values and vector-Jacobian products."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from stuq.core.errors import ShapeError

from .base import Primitive
from .registry import PrimitiveRegistry

Grads = tuple[Optional[np.ndarray], ...]


class Add(Primitive):
    name = "add"

    def forward(self, a, b):
        return a + b

    def backward(self, grad, output, inputs) -> Grads:
        return grad, grad


class Sub(Primitive):
    name = "sub"

    def forward(self, a, b):
        return a - b

    def backward(self, grad, output, inputs) -> Grads:
        return grad, -grad


class Mul(Primitive):
    name = "mul"

    def forward(self, a, b):
        return a * b

    def backward(self, grad, output, inputs) -> Grads:
        a, b = inputs
        return grad * b, grad * a


class Div(Primitive):
    name = "div"

    def forward(self, a, b):
        return a / b

    def backward(self, grad, output, inputs) -> Grads:
        a, b = inputs
        return grad / b, -grad * a / (b * b)


class Neg(Primitive):
    name = "neg"

    def forward(self, a):
        return -a

    def backward(self, grad, output, inputs) -> Grads:
        return (-grad,)


class MatMul(Primitive):
    name = "matmul"

    def forward(self, a, b):
        if a.ndim < 2 or b.ndim < 2:
            raise ShapeError(f"matmul needs operands with ndim >= 2, got {a.shape} and {b.shape}")
        return np.matmul(a, b)

    def backward(self, grad, output, inputs) -> Grads:
        a, b = inputs
        return (
            np.matmul(grad, np.swapaxes(b, -1, -2)),
            np.matmul(np.swapaxes(a, -1, -2), grad),
        )


class Conv2D(Primitive):
    """Same-padded 2-D cross-correlation on (batch, width, height, channels) fields.

    Kernels have shape (k, k, in_channels, out_channels) with k odd.
    """

    name = "conv2d"

    @staticmethod
    def _pad(x: np.ndarray, pad: int, padding: str) -> np.ndarray:
        widths = ((0, 0), (pad, pad), (pad, pad), (0, 0))
        if padding == "periodic":
            return np.pad(x, widths, mode="wrap")
        return np.pad(x, widths)

    def forward(self, x, w, padding: str = "zeros"):
        if x.ndim != 4 or w.ndim != 4:
            raise ShapeError(f"conv2d expects 4-D field and kernel, got {x.shape} and {w.shape}")
        k = w.shape[0]
        if w.shape[1] != k or k % 2 == 0:
            raise ShapeError(f"conv2d kernel must be square with odd size, got {w.shape[:2]}")
        if w.shape[2] != x.shape[3]:
            raise ShapeError(f"conv2d channel mismatch: field {x.shape[3]}, kernel {w.shape[2]}")
        patches = sliding_window_view(self._pad(x, k // 2, padding), (k, k), axis=(1, 2))
        return np.tensordot(patches, w, axes=([3, 4, 5], [2, 0, 1]))

    def backward(self, grad, output, inputs, padding: str = "zeros") -> Grads:
        x, w = inputs
        k = w.shape[0]
        pad = k // 2
        _, width, height, _ = x.shape
        padded = self._pad(x, pad, padding)
        patches = sliding_window_view(padded, (k, k), axis=(1, 2))
        grad_w = np.tensordot(patches, grad, axes=([0, 1, 2], [0, 1, 2])).transpose(1, 2, 0, 3)

        grad_padded = np.zeros_like(padded)
        for i in range(k):
            for j in range(k):
                grad_padded[:, i:i + width, j:j + height, :] += grad @ w[i, j].T

        if padding == "periodic":
            rows = np.arange(-pad, width + pad) % width
            cols = np.arange(-pad, height + pad) % height
            folded = np.zeros((x.shape[0], width, padded.shape[2], x.shape[3]))
            np.add.at(folded, (slice(None), rows), grad_padded)
            grad_x = np.zeros_like(x)
            np.add.at(grad_x, (slice(None), slice(None), cols), folded)
        else:
            grad_x = grad_padded[:, pad:pad + width, pad:pad + height, :]
        return grad_x, grad_w


class Sigmoid(Primitive):
    name = "sigmoid"

    def forward(self, x):
        return expit(x)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * output * (1.0 - output),)


class Tanh(Primitive):
    name = "tanh"

    def forward(self, x):
        return np.tanh(x)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * (1.0 - output * output),)


class Relu(Primitive):
    name = "relu"

    def forward(self, x):
        return np.maximum(x, 0.0)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * (inputs[0] > 0.0),)


class Abs(Primitive):
    name = "abs"

    def forward(self, x):
        return np.abs(x)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * np.sign(inputs[0]),)


class Softplus(Primitive):
    name = "softplus"

    def forward(self, x):
        return np.logaddexp(0.0, x)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * expit(inputs[0]),)


class Exp(Primitive):
    name = "exp"

    def forward(self, x):
        return np.exp(x)

    def backward(self, grad, output, inputs) -> Grads:
        return (grad * output,)


class Square(Primitive):
    name = "square"

    def forward(self, x):
        return x * x

    def backward(self, grad, output, inputs) -> Grads:
        return (2.0 * grad * inputs[0],)


class Softmax(Primitive):
    name = "softmax"

    def forward(self, x, axis: int = -1):
        shifted = np.exp(x - np.max(x, axis=axis, keepdims=True))
        return shifted / np.sum(shifted, axis=axis, keepdims=True)

    def backward(self, grad, output, inputs, axis: int = -1) -> Grads:
        inner = np.sum(grad * output, axis=axis, keepdims=True)
        return (output * (grad - inner),)


class CumSum(Primitive):
    name = "cumsum"

    def forward(self, x, axis: int = -1):
        return np.cumsum(x, axis=axis)

    def backward(self, grad, output, inputs, axis: int = -1) -> Grads:
        return (np.flip(np.cumsum(np.flip(grad, axis=axis), axis=axis), axis=axis),)


class Maximum(Primitive):
    """Elementwise maximum; the gradient goes to the larger element, ties to the first."""

    name = "maximum"

    def forward(self, a, b):
        return np.maximum(a, b)

    def backward(self, grad, output, inputs) -> Grads:
        a, b = inputs
        first = a >= b
        return grad * first, grad * ~first


class Indicator(Primitive):
    """Comparison mask; a constant for differentiation."""

    name = "indicator"
    differentiable = False

    _ops = {
        "gt": np.greater,
        "ge": np.greater_equal,
        "lt": np.less,
        "le": np.less_equal,
    }

    def forward(self, a, b, op: str = "gt"):
        if op not in self._ops:
            raise ShapeError(f"Unknown comparison: {op}")
        return self._ops[op](a, b).astype(np.float64)

    def backward(self, grad, output, inputs, op: str = "gt") -> Grads:
        return None, None


class Sum(Primitive):
    name = "sum"

    def forward(self, x, axis=None, keepdims: bool = False):
        return np.sum(x, axis=axis, keepdims=keepdims)

    def backward(self, grad, output, inputs, axis=None, keepdims: bool = False) -> Grads:
        shape = inputs[0].shape
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, shape).copy(),)


class Mean(Primitive):
    name = "mean"

    def forward(self, x, axis=None, keepdims: bool = False):
        return np.mean(x, axis=axis, keepdims=keepdims)

    def backward(self, grad, output, inputs, axis=None, keepdims: bool = False) -> Grads:
        x = inputs[0]
        count = x.size / max(np.size(output), 1)
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        return (np.broadcast_to(grad, x.shape) / count,)


class Concat(Primitive):
    name = "concat"

    def forward(self, *xs, axis: int = -1):
        return np.concatenate(xs, axis=axis)

    def backward(self, grad, output, inputs, axis: int = -1) -> Grads:
        sizes = np.cumsum([x.shape[axis] for x in inputs])[:-1]
        return tuple(np.split(grad, sizes, axis=axis))


class Stack(Primitive):
    name = "stack"

    def forward(self, *xs, axis: int = 0):
        return np.stack(xs, axis=axis)

    def backward(self, grad, output, inputs, axis: int = 0) -> Grads:
        return tuple(np.take(grad, i, axis=axis) for i in range(len(inputs)))


class Reshape(Primitive):
    name = "reshape"

    def forward(self, x, shape=()):
        return np.reshape(x, shape)

    def backward(self, grad, output, inputs, shape=()) -> Grads:
        return (np.reshape(grad, inputs[0].shape),)


class Transpose(Primitive):
    name = "transpose"

    def forward(self, x, axes=None):
        return np.transpose(x, axes)

    def backward(self, grad, output, inputs, axes=None) -> Grads:
        if axes is None:
            return (np.transpose(grad),)
        return (np.transpose(grad, np.argsort(axes)),)


class GetItem(Primitive):
    name = "getitem"

    def forward(self, x, index=()):
        return np.asarray(x[index])

    @staticmethod
    def _is_basic(index) -> bool:
        items = index if isinstance(index, tuple) else (index,)
        return all(
            isinstance(i, (int, np.integer, slice)) or i is Ellipsis or i is None
            for i in items
        )

    def backward(self, grad, output, inputs, index=()) -> Grads:
        result = np.zeros_like(inputs[0])
        if self._is_basic(index):
            result[index] += grad
        else:
            np.add.at(result, index, grad)
        return (result,)


def unbroadcast(grad: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    shape = tuple(shape)
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def build_default_registry() -> PrimitiveRegistry:
    """Registry holding every built-in primitive."""
    registry = PrimitiveRegistry()
    for primitive_cls in (
        Add, Sub, Mul, Div, Neg, MatMul, Conv2D, Sigmoid, Tanh, Relu, Abs,
        Softplus, Exp, Square, Softmax, CumSum, Maximum, Indicator, Sum, Mean,
        Concat, Stack, Reshape, Transpose, GetItem,
    ):
        registry.register(primitive_cls())
    return registry


PRIMITIVES = build_default_registry()
