"""Enumerations for stuq."""

from enum import Enum


class MethodTag(Enum):
    """Stable tags of the uncertainty quantification methods."""
    POINT = "point"
    BOOTSTRAP = "bootstrap"
    QUANTILE = "quantile"
    SQ = "sq"
    MIS = "mis"
    MC_DROPOUT = "mc-dropout"
    SG_MCMC = "sg-mcmc"

    @property
    def is_sampling(self) -> bool:
        """Whether bounds come from order statistics of Monte Carlo samples."""
        return self in (MethodTag.BOOTSTRAP, MethodTag.MC_DROPOUT, MethodTag.SG_MCMC)


class CellKind(Enum):
    """Spatial operator inside the recurrent cell."""
    GRID_CONV = "grid-conv"
    GRAPH_CONV = "graph-conv"


class HeadKind(Enum):
    """Output head layout."""
    POINT = "point"
    QUANTILE_3 = "quantile-3"
    INTERVAL_3 = "interval-3"
    SPLINE_11 = "spline-11"

    @property
    def width(self) -> int:
        """Values emitted per predicted scalar."""
        return {
            HeadKind.POINT: 1,
            HeadKind.QUANTILE_3: 3,
            HeadKind.INTERVAL_3: 3,
            HeadKind.SPLINE_11: 11,
        }[self]


class Gating(Enum):
    """Recurrent cell gating."""
    PLAIN = "plain"
    GRU = "gru"


class SupportKind(Enum):
    """Graph support matrices."""
    RANDOM_WALK = "random-walk"
    REVERSE_RANDOM_WALK = "reverse-random-walk"
    NORMALIZED_LAPLACIAN = "normalized-laplacian"


class OptimizerKind(Enum):
    """Gradient-based optimizers."""
    SGD = "plain-sgd"
    ADAM = "adam"


class GeneratorKind(Enum):
    """Synthetic dataset generators."""
    GRAPH_DIFFUSION = "graph-diffusion"
    SEASONAL_GRID = "seasonal-grid"
    HETEROSCEDASTIC_SCALAR = "heteroscedastic-scalar"


class BootstrapWeighting(Enum):
    """How a bootstrap replicate perturbs the training set."""
    SUBSAMPLE = "subsample"
    DIRICHLET = "dirichlet"


class PlotKind(Enum):
    """Plot-data CSV layouts."""
    FORECAST_BAND = "forecast-band"
    SWEEP = "sweep"
    COVERAGE_VS_WIDTH = "coverage-vs-width"


class PointLoss(Enum):
    """Loss used for point training."""
    MAE = "mae"
    MSE = "mse"
