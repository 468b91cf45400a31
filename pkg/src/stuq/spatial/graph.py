"""Graph adjacency construction and diffusion supports."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from stuq.core.enums import SupportKind
from stuq.core.errors import ShapeError, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class SpatialGraph:
    """Nonnegative P x P adjacency; may be directed."""
    adjacency: np.ndarray

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=np.float64)
        if self.adjacency.ndim != 2 or self.adjacency.shape[0] != self.adjacency.shape[1]:
            raise ShapeError(f"Adjacency must be square, got shape {self.adjacency.shape}")
        if self.adjacency.shape[0] < 1:
            raise ShapeError("Adjacency must have at least one node")
        if not np.all(np.isfinite(self.adjacency)):
            raise ValidationError("Adjacency entries must be finite")
        if np.any(self.adjacency < 0):
            raise ValidationError("Adjacency entries must be nonnegative")

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.allclose(self.adjacency, self.adjacency.T, rtol=0.0, atol=1e-12))

    def symmetrized(self) -> "SpatialGraph":
        """½(A + Aᵀ)."""
        return SpatialGraph(0.5 * (self.adjacency + self.adjacency.T))


@dataclass
class GraphSupport:
    """A P x P diffusion operator applied inside graph convolutions."""
    kind: SupportKind
    matrix: np.ndarray

    @property
    def node_count(self) -> int:
        return self.matrix.shape[0]


def gaussian_kernel_adjacency(
    distances: np.ndarray,
    sigma_squared: float,
    sparsity_threshold: float = 0.0,
) -> SpatialGraph:
    """A_ij = exp(-d_ij / sigma²), entries below the threshold zeroed, unit diagonal.

    The exponent uses d, not d²; pass squared distances for the squared form.
    """
    distances = np.asarray(distances, dtype=np.float64)
    if distances.ndim != 2 or distances.shape[0] != distances.shape[1]:
        raise ShapeError(f"Distance matrix must be square, got shape {distances.shape}")
    if not np.all(np.isfinite(distances)):
        raise ValidationError("Distances must be finite")
    if np.any(distances < 0):
        raise ValidationError("Distances must be nonnegative")
    if sigma_squared <= 0:
        raise ValidationError(f"sigma_squared must be positive, got {sigma_squared}")
    if not 0.0 <= sparsity_threshold < 1.0:
        raise ValidationError(f"sparsity_threshold must lie in [0, 1), got {sparsity_threshold}")

    adjacency = np.exp(-distances / sigma_squared)
    adjacency[adjacency < sparsity_threshold] = 0.0
    np.fill_diagonal(adjacency, 1.0)
    return SpatialGraph(adjacency)


def _row_normalize(matrix: np.ndarray) -> np.ndarray:
    degree = matrix.sum(axis=1)
    with np.errstate(divide="ignore"):
        inverse = np.where(degree > 0, 1.0 / degree, 0.0)
    return inverse[:, None] * matrix


def random_walk_support(graph: SpatialGraph) -> GraphSupport:
    """D⁻¹A with out-degree D; zero-degree rows stay zero."""
    return GraphSupport(SupportKind.RANDOM_WALK, _row_normalize(graph.adjacency))


def reverse_random_walk_support(graph: SpatialGraph) -> GraphSupport:
    """Random walk on Aᵀ (the backward direction of a directed graph)."""
    return GraphSupport(SupportKind.REVERSE_RANDOM_WALK, _row_normalize(graph.adjacency.T))


def normalized_laplacian_support(graph: SpatialGraph) -> GraphSupport:
    """I - D^{-1/2} A D^{-1/2} on the symmetrized graph.

    Isolated nodes keep identity rows.
    """
    if not graph.is_symmetric:
        logger.debug("Symmetrizing directed graph for the normalized Laplacian")
        graph = graph.symmetrized()
    adjacency = graph.adjacency
    degree = adjacency.sum(axis=1)
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(degree > 0, 1.0 / np.sqrt(degree), 0.0)
    normalized = inv_sqrt[:, None] * adjacency * inv_sqrt[None, :]
    laplacian = np.eye(graph.node_count) - normalized
    return GraphSupport(SupportKind.NORMALIZED_LAPLACIAN, laplacian)


_BUILDERS = {
    SupportKind.RANDOM_WALK: random_walk_support,
    SupportKind.REVERSE_RANDOM_WALK: reverse_random_walk_support,
    SupportKind.NORMALIZED_LAPLACIAN: normalized_laplacian_support,
}


def build_supports(graph: SpatialGraph, kinds: Iterable[SupportKind]) -> list[GraphSupport]:
    """Supports in the order requested, e.g. forward and reverse walks for a dual filter."""
    supports = []
    for kind in kinds:
        kind = SupportKind(kind)
        supports.append(_BUILDERS[kind](graph))
    return supports
