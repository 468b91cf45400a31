"""Central finite-difference check of recorded gradients."""

from __future__ import annotations

from typing import Any, Callable, Mapping

import numpy as np

from stuq.core.errors import ValidationError

from .base import DiffValue
from .tape import backward, no_tape, record


def finite_difference_check(
    program: Callable[[], Any],
    parameters: Mapping[str, DiffValue],
    step: float = 1e-5,
) -> float:
    """Max over coordinates of |analytic - central difference| / max(1, |analytic|).

    ``program`` takes no arguments, reads ``parameters`` and returns a scalar.
    """
    if step <= 0:
        raise ValidationError(f"step must be positive, got {step}")

    tape = record(program)
    analytic = backward(tape, tape.output, parameters)

    def evaluate() -> float:
        with no_tape():
            out = program()
        return float(out.item() if isinstance(out, DiffValue) else out)

    worst = 0.0
    for name, value in parameters.items():
        value.data = np.ascontiguousarray(value.data)
        flat = value.data.reshape(-1)
        grad = analytic[name].reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            upper = evaluate()
            flat[i] = original - step
            lower = evaluate()
            flat[i] = original
            numeric = (upper - lower) / (2.0 * step)
            error = abs(grad[i] - numeric) / max(1.0, abs(grad[i]))
            worst = max(worst, error)
    return worst
