"""Bootstrap ensembles of point forecasters."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from stuq.core.enums import BootstrapWeighting, MethodTag, SupportKind
from stuq.core.errors import ConfigError, ValidationError
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.spatial.graph import SpatialGraph

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .executor import ReplicateExecutor
from .point import point_predictions, train_point
from .seeds import derive_rng, derive_seed
from .training import TrainConfig

logger = logging.getLogger(__name__)


@dataclass
class EnsembleBudget:
    """Replicate count B, share of training windows kept, and the base seed.

    With ``vary_seed`` off every replicate starts from the base seed's
    initialization and shuffling, so only the resampled data differs.
    """
    replicates: int = 25
    keep_fraction: float = 0.5
    base_seed: int = 0
    weighting: BootstrapWeighting = BootstrapWeighting.SUBSAMPLE
    vary_seed: bool = True

    def __post_init__(self):
        self.weighting = BootstrapWeighting(self.weighting)
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ConfigError(f"keep_fraction must lie in (0, 1], got {self.keep_fraction}")


def resample(data: TrainingData, budget: EnsembleBudget, replicate: int) -> TrainingData:
    """The replicate's training windows; validation is never touched."""
    rng = derive_rng(budget.base_seed, "bootstrap-data", replicate)
    count = len(data.train)
    if budget.weighting == BootstrapWeighting.DIRICHLET:
        weights = rng.dirichlet(np.ones(count)) * count
        return TrainingData(data.train.reweighted(weights), data.validation)
    keep = max(1, int(round(budget.keep_fraction * count)))
    indices = np.sort(rng.choice(count, size=keep, replace=False))
    return TrainingData(data.train.subset(indices), data.validation)


def bootstrap_forecast(
    model_config: ModelConfig,
    data: TrainingData,
    budget: EnsembleBudget,
    test_inputs: np.ndarray,
    rho: float,
    train_config: Optional[TrainConfig] = None,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    executor: Optional[ReplicateExecutor] = None,
) -> ProbabilisticForecast:
    """Train B point models on resampled training sets and take order-statistic bounds."""
    if budget.replicates < 2:
        raise ValidationError("Bootstrap intervals need at least 2 replicates")
    train_config = train_config or TrainConfig()
    executor = executor or ReplicateExecutor()

    def replicate(b: int) -> np.ndarray:
        seed = derive_seed(budget.base_seed, "bootstrap", b) if budget.vary_seed else budget.base_seed
        result = train_point(model_config, resample(data, budget, b), train_config, graph, support_kinds, seed)
        return point_predictions(result, test_inputs)

    samples = np.stack(executor.map(replicate, range(budget.replicates), label="bootstrap replicate"))
    logger.info(f"Bootstrap finished {budget.replicates} replicates")
    return ProbabilisticForecast.from_samples(MethodTag.BOOTSTRAP, samples, rho)


class BootstrapMethod(UQMethod):
    """Ensemble of point models trained on resampled windows."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.BOOTSTRAP

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        budget = EnsembleBudget(
            replicates=context.setting("replicates", 25),
            keep_fraction=context.setting("keep_fraction", 0.5),
            base_seed=context.seed,
            weighting=context.setting("weighting", BootstrapWeighting.SUBSAMPLE),
            vary_seed=context.setting("vary_seed", True),
        )
        return bootstrap_forecast(
            context.model_config, context.data, budget, context.test_inputs, context.rho,
            context.train, context.graph, context.support_kinds, context.executor,
        )
