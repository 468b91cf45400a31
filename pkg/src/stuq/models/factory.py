"""Factory for creating forecasters."""

from __future__ import annotations

import logging
from typing import Mapping, Optional, Sequence

import numpy as np

from stuq.core.enums import CellKind, SupportKind
from stuq.core.errors import ConfigError
from stuq.spatial.graph import GraphSupport, SpatialGraph, build_supports

from .base import ModelConfig, RecurrentForecaster
from .graph import GraphForecaster
from .grid import GridForecaster

logger = logging.getLogger(__name__)


class ModelFactory:
    """Builds the forecaster matching a model config."""

    @classmethod
    def create(
        cls,
        config: ModelConfig,
        graph: Optional[SpatialGraph] = None,
        support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
        seed: int = 0,
    ) -> RecurrentForecaster:
        """Create a freshly initialized forecaster."""
        if config.cell_kind == CellKind.GRID_CONV:
            return GridForecaster(config, seed=seed)
        return GraphForecaster(config, cls._supports(config, graph, support_kinds), seed=seed)

    @classmethod
    def from_snapshot(
        cls,
        config: ModelConfig,
        snapshot: Mapping[str, np.ndarray],
        graph: Optional[SpatialGraph] = None,
        support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    ) -> RecurrentForecaster:
        """Rebuild a forecaster and load saved parameter values."""
        model = cls.create(config, graph, support_kinds)
        model.load_snapshot(snapshot)
        return model

    @classmethod
    def _supports(
        cls,
        config: ModelConfig,
        graph: Optional[SpatialGraph],
        support_kinds: Sequence[SupportKind],
    ) -> list[GraphSupport]:
        kinds = [SupportKind(k) for k in support_kinds]
        if len(kinds) != config.support_count:
            raise ConfigError(f"Config expects {config.support_count} supports, got kinds {[k.value for k in kinds]}")
        if not kinds:
            return []
        if graph is None:
            raise ConfigError("Graph models need a spatial graph")
        if graph.node_count != config.nodes:
            raise ConfigError(f"Graph has {graph.node_count} nodes, model expects {config.nodes}")
        logger.debug(f"Building supports {[k.value for k in kinds]} for {graph.node_count} nodes")
        return build_supports(graph, kinds)
