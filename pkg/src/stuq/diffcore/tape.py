"""Tape recording and reverse-mode accumulation."""

from __future__ import annotations

import itertools
import logging
import threading
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Mapping, Optional

import numpy as np

from stuq.core.errors import NonFiniteError, ShapeError, ValidationError

from .base import DiffValue, as_value
from .primitives import PRIMITIVES, unbroadcast
from .registry import PrimitiveRegistry

logger = logging.getLogger(__name__)

_tape_ids = itertools.count(1)
_local = threading.local()


def _stack() -> list[Optional["Tape"]]:
    stack = getattr(_local, "stack", None)
    if stack is None:
        stack = []
        _local.stack = stack
    return stack


def active_tape() -> Optional["Tape"]:
    """The tape recording on this thread, if any."""
    stack = _stack()
    return stack[-1] if stack else None


@contextmanager
def no_tape() -> Iterator[None]:
    """Evaluate without recording, e.g. for inference."""
    stack = _stack()
    stack.append(None)
    try:
        yield
    finally:
        stack.pop()


class Tape:
    """Recording of one forward program.

    Nodes are kept in creation order, which is a topological order of the
    computation. A tape is confined to the thread that records it.
    """

    def __init__(
        self,
        program: Optional[Callable[[], Any]] = None,
        registry: Optional[PrimitiveRegistry] = None,
    ):
        self.id = next(_tape_ids)
        self.program = program
        self.registry = registry or PRIMITIVES
        self.nodes: list[DiffValue] = []
        self.output: Optional[DiffValue] = None

    @property
    def dependencies(self) -> int:
        """Number of recorded primitive applications."""
        return len(self.nodes)

    def __enter__(self) -> "Tape":
        _stack().append(self)
        return self

    def __exit__(self, *exc) -> None:
        _stack().pop()

    def replay(self) -> DiffValue:
        """Re-run the program, replacing the previous recording."""
        if self.program is None:
            raise ValidationError("Tape has no program to replay")
        self.nodes = []
        with self:
            output = as_value(self.program())
        self.output = output
        return output


def record(program: Callable[[], Any], registry: Optional[PrimitiveRegistry] = None) -> Tape:
    """Record ``program`` on a fresh tape and return it with ``output`` set."""
    tape = Tape(program, registry)
    tape.replay()
    return tape


def apply(name: str, *inputs: Any, **attrs) -> DiffValue:
    """Apply a registered primitive, recording it on the active tape."""
    tape = active_tape()
    registry = tape.registry if tape is not None else PRIMITIVES
    primitive = registry.require(name)
    values = [as_value(x) for x in inputs]
    try:
        data = primitive.forward(*[v.data for v in values], **attrs)
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ShapeError(f"{name}: {e}") from e
    data = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(data)):
        raise NonFiniteError("Non-finite forward value", primitive=name)

    if tape is None or not primitive.differentiable or not any(v.tracked for v in values):
        return DiffValue(data)

    node = DiffValue(data, parents=values, primitive=primitive, attrs=attrs, tape_id=tape.id)
    tape.nodes.append(node)
    return node


def backward(
    tape: Tape,
    loss: DiffValue,
    parameters: Optional[Mapping[str, DiffValue]] = None,
) -> dict[str, np.ndarray]:
    """Accumulate d(loss)/d(leaf) over ``tape``.

    Returns gradients keyed by parameter name. With ``parameters`` given, every
    listed parameter gets an entry (exact zeros when untouched); otherwise
    every named leaf reached from the loss is returned.
    """
    if loss.data.size != 1:
        raise ValidationError(f"Loss must be a scalar, got shape {loss.data.shape}")

    grads: dict[int, np.ndarray] = {}
    leaves: dict[int, DiffValue] = {}
    if loss.tape_id == tape.id:
        grads[id(loss)] = np.ones_like(loss.data)
    elif loss.requires_grad:
        leaves[id(loss)] = loss
        grads[id(loss)] = np.ones_like(loss.data)
    elif loss.tracked:
        raise ValidationError("Loss was not recorded on this tape")

    for node in reversed(tape.nodes):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        node.grad = grad
        input_grads = node.primitive.backward(
            grad, node.data, [p.data for p in node.parents], **node.attrs
        )
        for parent, parent_grad in zip(node.parents, input_grads):
            if parent_grad is None or not parent.tracked:
                continue
            if not np.all(np.isfinite(parent_grad)):
                raise NonFiniteError("Non-finite gradient", primitive=node.primitive.name)
            parent_grad = unbroadcast(np.asarray(parent_grad, dtype=np.float64), parent.data.shape)
            key = id(parent)
            grads[key] = grads[key] + parent_grad if key in grads else parent_grad
            if parent.is_leaf:
                leaves[key] = parent

    if parameters is not None:
        return {
            name: grads.get(id(value), np.zeros_like(value.data))
            for name, value in parameters.items()
        }
    return {
        (leaf.name or f"leaf_{key}"): grads[key]
        for key, leaf in leaves.items()
        if leaf.requires_grad
    }
