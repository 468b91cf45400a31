"""Station-to-grid inverse-distance interpolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from stuq.core.errors import ShapeError, ValidationError

DEFAULT_EPSILON = 1e-6


@dataclass
class StationSet:
    """Measurement stations: positions (S, 2) and per-feature values (S, F)."""
    positions: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        self.values = values
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ShapeError(f"Station positions must be (S, 2), got {self.positions.shape}")
        if self.positions.shape[0] == 0:
            raise ValidationError("Station set is empty")
        if self.values.shape[0] != self.positions.shape[0]:
            raise ShapeError(
                f"{self.positions.shape[0]} positions but {self.values.shape[0]} value rows"
            )
        if self.positions.shape[0] > 1 and np.min(pdist(self.positions)) <= 1e-12:
            raise ValidationError("Station positions must be distinct")

    def __len__(self) -> int:
        return self.positions.shape[0]


def grid_cell_centers(width: int, height: int, extent: float = 1.0) -> np.ndarray:
    """Centers of a width x height grid over [0, extent]², row-major, shape (W*H, 2)."""
    xs = (np.arange(width) + 0.5) * extent / width
    ys = (np.arange(height) + 0.5) * extent / height
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([grid_x.ravel(), grid_y.ravel()])


def inverse_distance_interpolate(
    stations: StationSet,
    cells: np.ndarray,
    epsilon: float = DEFAULT_EPSILON,
) -> np.ndarray:
    """Normalized inverse-squared-distance weighting, weights 1 / (d² + epsilon).

    Returns (cells, F). With ``epsilon`` 0, a cell sitting on a station takes
    that station's value.
    """
    if len(stations) == 0:
        raise ValidationError("Station set is empty")
    if epsilon < 0:
        raise ValidationError(f"epsilon must be nonnegative, got {epsilon}")
    cells = np.asarray(cells, dtype=np.float64).reshape(-1, 2)

    squared = cdist(cells, stations.positions, metric="sqeuclidean")
    exact = squared + epsilon == 0.0
    with np.errstate(divide="ignore"):
        weights = np.where(exact, 0.0, 1.0 / (squared + epsilon))
    hit = exact.any(axis=1)
    weights[hit] = exact[hit].astype(np.float64)
    return weights @ stations.values / weights.sum(axis=1, keepdims=True)
