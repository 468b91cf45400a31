"""Shared enumerations, errors and window containers."""

from .enums import (
    BootstrapWeighting,
    CellKind,
    Gating,
    GeneratorKind,
    HeadKind,
    MethodTag,
    OptimizerKind,
    PlotKind,
    PointLoss,
    SupportKind,
)
from .errors import (
    ConfigError,
    DivergenceError,
    NonFiniteError,
    ParseError,
    ShapeError,
    StuqError,
    UnsupportedPrimitiveError,
    ValidationError,
)
from .windows import TrainingData, WindowSet

__all__ = [
    "BootstrapWeighting",
    "CellKind",
    "ConfigError",
    "DivergenceError",
    "Gating",
    "GeneratorKind",
    "HeadKind",
    "MethodTag",
    "NonFiniteError",
    "OptimizerKind",
    "ParseError",
    "PlotKind",
    "PointLoss",
    "ShapeError",
    "StuqError",
    "SupportKind",
    "TrainingData",
    "UnsupportedPrimitiveError",
    "ValidationError",
    "WindowSet",
]
