"""Uncertainty quantification methods."""

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .bootstrap import BootstrapMethod, EnsembleBudget, bootstrap_forecast, resample
from .ensemble import ensemble_heads
from .executor import ReplicateExecutor
from .mc_dropout import MCDropoutMethod, mc_dropout_forecast
from .mis import MISMethod, mis_forecast
from .point import PointMethod, point_predictions, train_point, train_regressor
from .quantile import QuantileMethod, quantile_forecast
from .registry import METHODS, MethodRegistry, build_default_registry
from .seeds import derive_rng, derive_seed
from .sgnht import (
    ParameterVector,
    SamplerConfig,
    SGNHTMethod,
    SGNHTState,
    run_chain,
    sgnht_sample,
    sgnht_step,
)
from .spline_quantile import SplineQuantileMethod, sq_forecast
from .training import TrainConfig, TrainResult, evaluate_loss, loss_weights, objective_for, train_model

__all__ = [
    "BootstrapMethod",
    "EnsembleBudget",
    "MCDropoutMethod",
    "METHODS",
    "MISMethod",
    "MethodContext",
    "MethodRegistry",
    "ParameterVector",
    "PointMethod",
    "ProbabilisticForecast",
    "QuantileMethod",
    "ReplicateExecutor",
    "SGNHTMethod",
    "SGNHTState",
    "SamplerConfig",
    "SplineQuantileMethod",
    "TrainConfig",
    "TrainResult",
    "UQMethod",
    "bootstrap_forecast",
    "build_default_registry",
    "derive_rng",
    "derive_seed",
    "ensemble_heads",
    "evaluate_loss",
    "loss_weights",
    "mc_dropout_forecast",
    "mis_forecast",
    "objective_for",
    "point_predictions",
    "quantile_forecast",
    "resample",
    "run_chain",
    "sgnht_sample",
    "sgnht_step",
    "sq_forecast",
    "train_model",
    "train_point",
    "train_regressor",
]
