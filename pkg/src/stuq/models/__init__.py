"""Grid- and graph-convolutional recurrent forecasters."""

from .base import (
    HEAD_LABELS,
    ForecastOutput,
    ModelConfig,
    RecurrentForecaster,
    forecast,
    is_bias,
    recurrent_step,
)
from .dropout import apply_dropout_masks, dropout_masks, dropped_fraction
from .factory import ModelFactory
from .graph import GraphForecaster, dense_cell_step, graph_cell_step
from .grid import GridForecaster, grid_cell_step

__all__ = [
    "ForecastOutput",
    "GraphForecaster",
    "GridForecaster",
    "HEAD_LABELS",
    "ModelConfig",
    "ModelFactory",
    "RecurrentForecaster",
    "apply_dropout_masks",
    "dense_cell_step",
    "dropout_masks",
    "dropped_fraction",
    "forecast",
    "graph_cell_step",
    "grid_cell_step",
    "is_bias",
    "recurrent_step",
]
