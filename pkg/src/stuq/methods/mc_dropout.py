"""Monte Carlo dropout at prediction time."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from stuq.core.enums import MethodTag
from stuq.core.errors import ValidationError
from stuq.models.base import RecurrentForecaster
from stuq.models.dropout import apply_dropout_masks, dropped_fraction

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .executor import ReplicateExecutor
from .point import point_predictions, train_point
from .seeds import derive_seed

logger = logging.getLogger(__name__)


def mc_dropout_forecast(
    model: RecurrentForecaster,
    rate: float,
    passes: int,
    test_inputs: np.ndarray,
    rho: float,
    seed: int,
    executor: Optional[ReplicateExecutor] = None,
) -> ProbabilisticForecast:
    """T forecasts under independent weight masks of a trained point model."""
    if not 0.0 <= rate < 1.0:
        raise ValidationError(f"Dropout rate must lie in [0, 1), got {rate}")
    if passes < 2:
        raise ValidationError("MC dropout intervals need at least 2 passes")
    executor = executor or ReplicateExecutor()

    def one_pass(t: int) -> np.ndarray:
        view = apply_dropout_masks(model, rate, derive_seed(seed, "dropout", t))
        if t == 0:
            logger.debug(f"Pass 0 dropped {dropped_fraction(model, view):.4f} of the weights")
        return view.forecast(test_inputs)["point"]

    samples = np.stack(executor.map(one_pass, range(passes), label="dropout pass"))
    return ProbabilisticForecast.from_samples(MethodTag.MC_DROPOUT, samples, rho)


class MCDropoutMethod(UQMethod):
    """Point training, then stochastic weight masks at inference.

    With several trials each trial draws its own masks; the experiment
    averages the per-trial metrics.
    """

    @property
    def tag(self) -> MethodTag:
        return MethodTag.MC_DROPOUT

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        result = train_point(
            context.model_config, context.data, context.train, context.graph,
            context.support_kinds, seed=context.seed,
        )
        rate = context.setting("rate", context.model_config.dropout_rate or 0.05)
        passes = context.setting("passes", 50)
        trials = context.setting("trials", 1)
        forecasts = [
            mc_dropout_forecast(
                result.model, rate, passes, context.test_inputs, context.rho,
                derive_seed(context.seed, "dropout-trial", trial), context.executor,
            )
            for trial in range(trials)
        ]
        logger.info(f"MC dropout ran {trials} trial(s) of {passes} passes at rate {rate}")
        forecast = forecasts[0]
        forecast.extras["trials"] = forecasts
        return forecast
