"""Grid-convolutional recurrent forecaster."""

from __future__ import annotations

from typing import Mapping, Optional

from stuq.core.enums import CellKind, Gating
from stuq.core.errors import ConfigError, ShapeError
from stuq.diffcore import DiffValue, ops
from stuq.diffcore.base import as_value

from .base import ModelConfig, RecurrentForecaster, recurrent_step


def grid_cell_step(
    state,
    inputs,
    parameters: Mapping[str, DiffValue],
    prefix: str = "cell",
    gating: Gating = Gating.GRU,
    padding: str = "zeros",
) -> DiffValue:
    """h_{t+1} from state (W, H, U) and input (W, H, D), optionally batched."""
    state, inputs = as_value(state), as_value(inputs)
    if state.data.ndim not in (3, 4) or state.data.ndim != inputs.data.ndim:
        raise ShapeError(f"Grid state {state.data.shape} and input {inputs.data.shape} must both be (W, H, C)")
    if state.data.shape[:-1] != inputs.data.shape[:-1]:
        raise ShapeError(f"Grid state {state.data.shape} and input {inputs.data.shape} disagree")
    squeeze = state.data.ndim == 3
    if squeeze:
        state = ops.reshape(state, (1,) + state.data.shape)
        inputs = ops.reshape(inputs, (1,) + inputs.data.shape)

    def spatial(x: DiffValue, weight: DiffValue) -> DiffValue:
        return ops.conv2d(x, weight, padding=padding)

    out = recurrent_step(state, inputs, parameters, prefix, gating, spatial)
    return ops.reshape(out, out.data.shape[1:]) if squeeze else out


class GridForecaster(RecurrentForecaster):
    """Recurrent forecaster whose cells convolve over a W x H field.

    Frames travel as (batch, P, D) with P = W * H in row-major order.
    """

    def __init__(
        self,
        config: ModelConfig,
        parameters: Optional[dict[str, DiffValue]] = None,
        seed: int = 0,
    ):
        if config.cell_kind != CellKind.GRID_CONV:
            raise ConfigError(f"GridForecaster needs cell_kind grid-conv, got {config.cell_kind.value}")
        super().__init__(config, parameters, seed)

    def weight_shape(self, d_in: int, d_out: int) -> tuple[int, ...]:
        k = self.config.kernel_size
        return (k, k, d_in, d_out)

    def spatial(self, x: DiffValue, weight: DiffValue) -> DiffValue:
        batch, nodes, channels = x.data.shape
        width, height = self.config.grid_shape
        field = ops.reshape(x, (batch, width, height, channels))
        out = ops.conv2d(field, weight, padding=self.config.padding)
        return ops.reshape(out, (batch, nodes, weight.data.shape[-1]))
