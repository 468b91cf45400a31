"""Point forecaster baseline."""

from __future__ import annotations

import dataclasses
import logging
from typing import Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, MethodTag, SupportKind
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.models.factory import ModelFactory
from stuq.spatial.graph import SpatialGraph

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .training import TrainConfig, TrainResult, objective_for, train_model

logger = logging.getLogger(__name__)


def train_regressor(
    model_config: ModelConfig,
    data: TrainingData,
    train_config: TrainConfig,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    seed: int = 0,
    rho: float = 0.05,
) -> TrainResult:
    """Initialize from ``seed`` and train with the loss matching the head kind."""
    model = ModelFactory.create(model_config, graph, support_kinds, seed=seed)
    objective = objective_for(model_config.head_kind, train_config, rho)
    return train_model(model, data, objective, train_config, seed=seed)


def train_point(
    model_config: ModelConfig,
    data: TrainingData,
    train_config: TrainConfig,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    seed: int = 0,
) -> TrainResult:
    """Train a point-head model by MAE (or MSE) with early stopping."""
    config = dataclasses.replace(model_config, head_kind=HeadKind.POINT)
    result = train_regressor(config, data, train_config, graph, support_kinds, seed)
    logger.info(f"Point model trained for {result.epochs_run} epochs (best {result.best_epoch})")
    return result


def point_predictions(result: TrainResult, test_inputs: np.ndarray) -> np.ndarray:
    return result.model.forecast(test_inputs)["point"]


class PointMethod(UQMethod):
    """Deterministic forecast without an interval."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.POINT

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        result = train_point(
            context.model_config, context.data, context.train, context.graph,
            context.support_kinds, seed=context.seed,
        )
        mean = point_predictions(result, context.test_inputs)
        return ProbabilisticForecast(
            self.tag, context.rho, mean, extras={"epochs": result.epochs_run, "model": result.model}
        )
