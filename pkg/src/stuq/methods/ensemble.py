"""Averaging heads over independently trained regressors."""

from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, SupportKind
from stuq.core.errors import ConfigError
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.spatial.graph import SpatialGraph

from .executor import ReplicateExecutor
from .point import train_regressor
from .seeds import derive_rng, derive_seed
from .training import TrainConfig

logger = logging.getLogger(__name__)


def ensemble_heads(
    model_config: ModelConfig,
    data: TrainingData,
    train_config: TrainConfig,
    test_inputs: np.ndarray,
    rho: float,
    seed: int,
    size: int = 1,
    keep_fraction: float = 1.0,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    executor: Optional[ReplicateExecutor] = None,
) -> dict[str, np.ndarray]:
    """Head arrays of ``size`` regressors, averaged per head.

    A single member is trained from ``seed`` on all windows. Larger ensembles
    draw each member's initialization and, below ``keep_fraction`` 1, its
    training windows from derived seeds.
    """
    if size < 1:
        raise ConfigError(f"Ensemble size must be >= 1, got {size}")
    if not 0.0 < keep_fraction <= 1.0:
        raise ConfigError(f"keep_fraction must lie in (0, 1], got {keep_fraction}")
    if model_config.head_kind == HeadKind.SPLINE_11:
        raise ConfigError("Spline heads are monotone and are not ensembled")
    executor = executor or ReplicateExecutor()

    def member(e: int) -> dict[str, np.ndarray]:
        member_seed = seed if size == 1 else derive_seed(seed, "ensemble", e)
        member_data = data
        if size > 1 and keep_fraction < 1.0:
            rng = derive_rng(seed, "ensemble-data", e)
            keep = max(1, int(round(keep_fraction * len(data.train))))
            indices = np.sort(rng.choice(len(data.train), size=keep, replace=False))
            member_data = TrainingData(data.train.subset(indices), data.validation)
        result = train_regressor(model_config, member_data, train_config, graph, support_kinds, member_seed, rho)
        return result.model.forecast(test_inputs).heads

    members = executor.map(member, range(size), label="ensemble member")
    if size > 1:
        logger.info(f"Averaged heads over {size} regressors")
    return {label: np.mean([m[label] for m in members], axis=0) for label in members[0]}
