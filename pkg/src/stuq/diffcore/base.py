"""Base classes for differentiable values and primitives."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from stuq.core.errors import ShapeError


@dataclass(frozen=True)
class Shape:
    """Ordered extents of a dense array."""
    dims: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.dims):
            raise ShapeError(f"Every extent must be >= 1, got {self.dims}")

    @property
    def size(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.dims)


class DiffValue:
    """A dense float64 array that may take part in reverse-mode differentiation.

    Leaves created with ``requires_grad=True`` are parameters. Values produced by
    a primitive while a tape is recording keep references to their parents; the
    tape owns them and ``grad`` is filled in by ``backward``.
    """

    __slots__ = (
        "data",
        "grad",
        "parents",
        "primitive",
        "attrs",
        "tape_id",
        "requires_grad",
        "name",
    )

    __array_priority__ = 100.0

    def __init__(
        self,
        data: Any,
        *,
        requires_grad: bool = False,
        name: Optional[str] = None,
        parents: Sequence["DiffValue"] = (),
        primitive: Optional["Primitive"] = None,
        attrs: Optional[dict] = None,
        tape_id: Optional[int] = None,
    ):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.parents = tuple(parents)
        self.primitive = primitive
        self.attrs = attrs or {}
        self.tape_id = tape_id
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> Shape:
        return Shape(tuple(self.data.shape))

    @property
    def is_leaf(self) -> bool:
        return not self.parents

    @property
    def tracked(self) -> bool:
        """True when gradients can flow into this value."""
        return self.requires_grad or bool(self.parents)

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"Cannot convert array of shape {self.data.shape} to a scalar")
        return float(self.data.reshape(()))

    def __float__(self) -> float:
        return self.item()

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"DiffValue(shape={self.data.shape}{label})"

    # Operator sugar; the implementations live in ops.
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from . import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    def __rmul__(self, other):
        from . import ops
        return ops.mul(other, self)

    def __truediv__(self, other):
        from . import ops
        return ops.div(self, other)

    def __rtruediv__(self, other):
        from . import ops
        return ops.div(other, self)

    def __neg__(self):
        from . import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __rmatmul__(self, other):
        from . import ops
        return ops.matmul(other, self)

    def __getitem__(self, index):
        from . import ops
        return ops.getitem(self, index)

    def sum(self, axis=None, keepdims: bool = False):
        from . import ops
        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        from . import ops
        return ops.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        from . import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)


def as_value(x: Any) -> DiffValue:
    """Wrap arrays and scalars as constant values."""
    if isinstance(x, DiffValue):
        return x
    return DiffValue(x)


class Primitive(ABC):
    """Abstract base class for operations the tape can record."""

    differentiable: bool = True

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique primitive identifier."""
        pass

    @abstractmethod
    def forward(self, *inputs: np.ndarray, **attrs) -> np.ndarray:
        """Compute the output array."""
        pass

    @abstractmethod
    def backward(
        self,
        grad: np.ndarray,
        output: np.ndarray,
        inputs: Sequence[np.ndarray],
        **attrs,
    ) -> tuple[Optional[np.ndarray], ...]:
        """Return the gradient for each input given the output gradient."""
        pass
