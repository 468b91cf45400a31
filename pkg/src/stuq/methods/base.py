"""Base classes for uncertainty quantification methods."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from stuq.core.enums import MethodTag
from stuq.core.errors import ShapeError, ValidationError
from stuq.core.windows import TrainingData
from stuq.models.base import ModelConfig
from stuq.scoring.intervals import empirical_bounds
from stuq.spatial.graph import SpatialGraph

from .executor import ReplicateExecutor
from .training import TrainConfig


@dataclass
class ProbabilisticForecast:
    """Mean and (1 - rho) bounds for every test window, (N, H, P, D) each.

    ``samples`` holds the S Monte Carlo forecasts (S, N, H, P, D) for the
    sampling methods. Head-based bounds may cross; sampled bounds never do.
    """
    method: MethodTag
    rho: float
    mean: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.method = MethodTag(self.method)
        if not 0.0 < self.rho < 1.0:
            raise ValidationError(f"rho must lie in (0, 1), got {self.rho}")
        for name in ("lower", "upper"):
            bound = getattr(self, name)
            if bound is not None and bound.shape != self.mean.shape:
                raise ShapeError(f"{name} has shape {bound.shape}, mean {self.mean.shape}")
        if self.samples is not None and self.samples.shape[1:] != self.mean.shape:
            raise ShapeError(f"samples {self.samples.shape} do not match mean {self.mean.shape}")

    @property
    def has_interval(self) -> bool:
        return self.lower is not None

    @property
    def sample_count(self) -> Optional[int]:
        return None if self.samples is None else self.samples.shape[0]

    @property
    def crossing(self) -> bool:
        """True when an upper bound falls below its lower bound anywhere."""
        return self.has_interval and bool(np.any(self.upper < self.lower))

    @classmethod
    def from_samples(
        cls,
        method: MethodTag,
        samples: np.ndarray,
        rho: float,
        **extras,
    ) -> "ProbabilisticForecast":
        """Sample mean plus order-statistic bounds across the sample axis."""
        samples = np.asarray(samples, dtype=np.float64)
        lower, upper = empirical_bounds(samples, rho, axis=0)
        return cls(method, rho, samples.mean(axis=0), lower, upper, samples, dict(extras))

    def truncated(self, count: int) -> "ProbabilisticForecast":
        """The forecast built from the first ``count`` samples only."""
        if self.samples is None:
            raise ValidationError(f"{self.method.value} forecasts have no samples to truncate")
        if not 2 <= count <= self.samples.shape[0]:
            raise ValidationError(f"Sample count {count} outside [2, {self.samples.shape[0]}]")
        return ProbabilisticForecast.from_samples(self.method, self.samples[:count], self.rho, **self.extras)

    def map_values(self, fn) -> "ProbabilisticForecast":
        """Apply an elementwise transform (e.g. denormalization) to every array."""
        return ProbabilisticForecast(
            self.method,
            self.rho,
            fn(self.mean),
            None if self.lower is None else fn(self.lower),
            None if self.upper is None else fn(self.upper),
            None if self.samples is None else fn(self.samples),
            dict(self.extras),
        )


@dataclass
class MethodContext:
    """Everything a method needs to produce a forecast for the test windows."""
    model_config: ModelConfig
    data: TrainingData
    test_inputs: np.ndarray
    rho: float
    seed: int
    train: TrainConfig = field(default_factory=TrainConfig)
    graph: Optional[SpatialGraph] = None
    support_kinds: tuple = ("random-walk",)
    settings: dict[str, Any] = field(default_factory=dict)
    executor: ReplicateExecutor = field(default_factory=ReplicateExecutor)

    def setting(self, key: str, default: Any = None) -> Any:
        return self.settings.get(key, default)


class UQMethod(ABC):
    """Abstract base class for the uncertainty quantification procedures."""

    @property
    @abstractmethod
    def tag(self) -> MethodTag:
        """Stable method tag used by configs and the CLI."""
        pass

    @abstractmethod
    def run(self, context: MethodContext) -> ProbabilisticForecast:
        """Train (or sample) and forecast the test windows."""
        pass

    @property
    def is_sampling(self) -> bool:
        return self.tag.is_sampling
