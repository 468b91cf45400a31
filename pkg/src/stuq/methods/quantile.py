"""Quantile regression with three pinball-trained heads."""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, MethodTag, SupportKind
from stuq.core.errors import ConfigError
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.spatial.graph import SpatialGraph

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .ensemble import ensemble_heads
from .executor import ReplicateExecutor
from .training import TrainConfig

logger = logging.getLogger(__name__)


def quantile_forecast(
    model_config: ModelConfig,
    data: TrainingData,
    test_inputs: np.ndarray,
    rho: float = 0.05,
    train_config: Optional[TrainConfig] = None,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    seed: int = 0,
    ensemble_size: int = 1,
    ensemble_keep: float = 1.0,
    executor: Optional[ReplicateExecutor] = None,
) -> ProbabilisticForecast:
    """Heads at levels (ρ/2, 0.5, 1 - ρ/2); the outer heads are the bounds, never reordered."""
    if model_config.head_kind != HeadKind.QUANTILE_3:
        raise ConfigError(f"Quantile regression needs head kind quantile-3, got {model_config.head_kind.value}")
    heads = ensemble_heads(
        model_config, data, train_config or TrainConfig(), test_inputs, rho, seed,
        size=ensemble_size, keep_fraction=ensemble_keep, graph=graph,
        support_kinds=support_kinds, executor=executor,
    )
    forecast = ProbabilisticForecast(
        MethodTag.QUANTILE, rho, heads["q_median"], heads["q_lower"], heads["q_upper"]
    )
    if forecast.crossing:
        logger.warning("Quantile heads cross on some test positions")
    return forecast


class QuantileMethod(UQMethod):
    """Pinball-loss regression of the interval endpoints and the median."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.QUANTILE

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        return quantile_forecast(
            context.model_config, context.data, context.test_inputs, context.rho, context.train,
            context.graph, context.support_kinds, context.seed,
            ensemble_size=context.setting("ensemble_size", 1),
            ensemble_keep=context.setting("ensemble_keep", 1.0), executor=context.executor,
        )
