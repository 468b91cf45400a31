"""Exception hierarchy for stuq.

Validation problems map to CLI exit code 1, numerical divergence to 2.
"""

from __future__ import annotations

from typing import Optional


class StuqError(Exception):
    """Base class for all stuq errors."""

    exit_code = 1


class ConfigError(StuqError, ValueError):
    """Invalid or missing configuration."""


class ValidationError(StuqError, ValueError):
    """Inputs violate a documented precondition."""


class ShapeError(ValidationError):
    """Array shapes do not agree."""


class ParseError(ValidationError):
    """A data file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedPrimitiveError(ValidationError):
    """A program used a primitive the tape does not know."""

    def __init__(self, primitive: str):
        super().__init__(f"Unsupported primitive: {primitive}")
        self.primitive = primitive


class DivergenceError(StuqError, RuntimeError):
    """Training or sampling produced non-finite values."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        epoch: Optional[int] = None,
        step: Optional[int] = None,
        primitive: Optional[str] = None,
    ):
        where = []
        if epoch is not None:
            where.append(f"epoch {epoch}")
        if step is not None:
            where.append(f"step {step}")
        if primitive is not None:
            where.append(f"primitive {primitive}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.epoch = epoch
        self.step = step
        self.primitive = primitive


class NonFiniteError(DivergenceError):
    """A primitive produced NaN or Inf in its output or gradient."""
