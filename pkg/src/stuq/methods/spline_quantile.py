"""Spline-quantile regression trained by closed-form CRPS."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, MethodTag, SupportKind
from stuq.core.errors import ConfigError
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.scoring.spline import spline_quantiles
from stuq.spatial.graph import SpatialGraph

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .point import train_regressor
from .training import TrainConfig


def sq_forecast(
    model_config: ModelConfig,
    data: TrainingData,
    test_inputs: np.ndarray,
    rho: float = 0.05,
    train_config: Optional[TrainConfig] = None,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    seed: int = 0,
) -> ProbabilisticForecast:
    """Mean Q(0.5) with bounds Q(ρ/2) and Q(1 - ρ/2); monotone, so bounds never cross."""
    if model_config.head_kind != HeadKind.SPLINE_11:
        raise ConfigError(f"Spline-quantile regression needs head kind spline-11, got {model_config.head_kind.value}")
    result = train_regressor(model_config, data, train_config or TrainConfig(), graph, support_kinds, seed, rho)
    params = result.model.forecast(test_inputs)["spline"]
    quantiles = spline_quantiles(params, (rho / 2.0, 0.5, 1.0 - rho / 2.0))
    return ProbabilisticForecast(
        MethodTag.SQ, rho, quantiles[..., 1], quantiles[..., 0], quantiles[..., 2],
        extras={"spline": params},
    )


class SplineQuantileMethod(UQMethod):
    """Monotone piecewise-linear quantile function per predicted scalar."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.SQ

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        return sq_forecast(
            context.model_config, context.data, context.test_inputs, context.rho, context.train,
            context.graph, context.support_kinds, context.seed,
        )
