"""Training losses, interval extraction and evaluation metrics."""

from .intervals import (
    IntervalSpec,
    SampleBatch,
    brute_force_mis_minimizer,
    empirical_bounds,
    empirical_interval,
    mis_metric,
    mis_values,
    order_statistic_ranks,
)
from .losses import (
    QUANTILE_LEVELS,
    crps_loss,
    mae_loss,
    mis_elementwise,
    mis_training_loss,
    mse_loss,
    pinball_loss,
    quantile_loss,
)
from .metrics import METRIC_NAMES, MetricBundle, summary_metrics
from .spline import (
    SPLINE_WIDTH,
    SplineQuantileParams,
    crossing_level,
    crps_from_parts,
    crps_pwl,
    spline_parts,
    spline_quantile_eval,
    spline_quantiles,
)

__all__ = [
    "IntervalSpec",
    "METRIC_NAMES",
    "MetricBundle",
    "QUANTILE_LEVELS",
    "SPLINE_WIDTH",
    "SampleBatch",
    "SplineQuantileParams",
    "brute_force_mis_minimizer",
    "crossing_level",
    "crps_from_parts",
    "crps_loss",
    "crps_pwl",
    "empirical_bounds",
    "empirical_interval",
    "mae_loss",
    "mis_elementwise",
    "mis_metric",
    "mis_training_loss",
    "mis_values",
    "mse_loss",
    "order_statistic_ranks",
    "pinball_loss",
    "quantile_loss",
    "spline_parts",
    "spline_quantile_eval",
    "spline_quantiles",
    "summary_metrics",
]
