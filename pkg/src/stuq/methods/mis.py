"""Interval regression trained on the interval score plus MAE."""

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


def mis_forecast(
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
    """Jointly learned (lower, point, upper) heads."""
    if model_config.head_kind != HeadKind.INTERVAL_3:
        raise ConfigError(f"MIS regression needs head kind interval-3, got {model_config.head_kind.value}")
    heads = ensemble_heads(
        model_config, data, train_config or TrainConfig(), test_inputs, rho, seed,
        size=ensemble_size, keep_fraction=ensemble_keep, graph=graph,
        support_kinds=support_kinds, executor=executor,
    )
    forecast = ProbabilisticForecast(MethodTag.MIS, rho, heads["point"], heads["lower"], heads["upper"])
    if forecast.crossing:
        logger.warning("Interval heads cross on some test positions")
    return forecast


class MISMethod(UQMethod):
    """Direct regression of the interval endpoints."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.MIS

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        return mis_forecast(
            context.model_config, context.data, context.test_inputs, context.rho, context.train,
            context.graph, context.support_kinds, context.seed,
            ensemble_size=context.setting("ensemble_size", 1),
            ensemble_keep=context.setting("ensemble_keep", 1.0), executor=context.executor,
        )
