"""Graph-convolutional recurrent forecaster."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from stuq.core.enums import CellKind, Gating
from stuq.core.errors import ConfigError, ShapeError
from stuq.diffcore import DiffValue, ops
from stuq.diffcore.base import as_value
from stuq.spatial.conv import diffusion_term_count, graph_conv
from stuq.spatial.graph import GraphSupport

from .base import ModelConfig, RecurrentForecaster, recurrent_step


def graph_cell_step(
    state,
    inputs,
    supports: Sequence[GraphSupport],
    parameters: Mapping[str, DiffValue],
    prefix: str = "cell",
    gating: Gating = Gating.GRU,
    diffusion_steps: int = 1,
    include_self: bool = False,
) -> DiffValue:
    """h_{t+1} from state (P, U) and input (P, D), optionally with a leading batch axis."""
    state, inputs = as_value(state), as_value(inputs)
    if state.data.ndim != inputs.data.ndim or state.data.shape[:-1] != inputs.data.shape[:-1]:
        raise ShapeError(f"State {state.data.shape} and input {inputs.data.shape} disagree")
    for support in supports:
        matrix = support.matrix if isinstance(support, GraphSupport) else np.asarray(support)
        if matrix.shape != (state.data.shape[-2],) * 2:
            raise ShapeError(f"Support {matrix.shape} does not match {state.data.shape[-2]} nodes")

    def spatial(x: DiffValue, weight: DiffValue) -> DiffValue:
        return graph_conv(weight, x, supports, diffusion_steps, include_self)

    return recurrent_step(state, inputs, parameters, prefix, gating, spatial)


class GraphForecaster(RecurrentForecaster):
    """Recurrent forecaster whose cells diffuse over graph supports."""

    def __init__(
        self,
        config: ModelConfig,
        supports: Sequence[GraphSupport],
        parameters: Optional[dict[str, DiffValue]] = None,
        seed: int = 0,
    ):
        if config.cell_kind != CellKind.GRAPH_CONV:
            raise ConfigError(f"GraphForecaster needs cell_kind graph-conv, got {config.cell_kind.value}")
        if len(supports) != config.support_count:
            raise ConfigError(f"Config expects {config.support_count} supports, got {len(supports)}")
        for support in supports:
            if support.matrix.shape != (config.nodes, config.nodes):
                raise ShapeError(f"Support {support.matrix.shape} does not match {config.nodes} nodes")
        self.supports = list(supports)
        super().__init__(config, parameters, seed)

    @property
    def terms(self) -> int:
        return diffusion_term_count(self.config.support_count, self.config.diffusion_steps, self.config.include_self)

    def weight_shape(self, d_in: int, d_out: int) -> tuple[int, ...]:
        return (self.terms * d_in, d_out)

    def spatial(self, x: DiffValue, weight: DiffValue) -> DiffValue:
        return graph_conv(weight, x, self.supports, self.config.diffusion_steps, self.config.include_self)

    def permuted(self, order: np.ndarray) -> "GraphForecaster":
        """The same model with nodes relabelled by ``order``."""
        order = np.asarray(order)
        supports = [GraphSupport(s.kind, s.matrix[np.ix_(order, order)]) for s in self.supports]
        return GraphForecaster(self.config, supports, parameters=self.parameters)


def dense_cell_step(state, inputs, parameters: Mapping[str, DiffValue], prefix: str, gating: Gating) -> DiffValue:
    """Reference dense recurrence used to check graph and grid cells."""
    return recurrent_step(as_value(state), as_value(inputs), parameters, prefix, gating, ops.matmul)
