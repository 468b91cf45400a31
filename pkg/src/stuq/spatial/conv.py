"""Diffusion graph convolution."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from stuq.core.errors import ShapeError
from stuq.diffcore import DiffValue, ops
from stuq.diffcore.base import as_value

from .graph import GraphSupport

SupportLike = Union[GraphSupport, np.ndarray]


def diffusion_term_count(support_count: int, diffusion_steps: int, include_self: bool = False) -> int:
    """Number of weight blocks one graph convolution uses."""
    return int(include_self) + support_count * diffusion_steps


def graph_conv(
    weights: DiffValue,
    features,
    supports: Sequence[SupportLike],
    diffusion_steps: int = 1,
    include_self: bool = False,
) -> DiffValue:
    """Σ_k (Sᵏ · X) · W_k over every support S and k = 1..K.

    ``features`` is (..., P, D_in); ``weights`` stacks the blocks W_k row-wise
    into one (terms * D_in, D_out) matrix, with the identity term first when
    ``include_self`` is set and then the powers of each support in order.
    """
    if diffusion_steps < 1:
        raise ShapeError(f"diffusion_steps must be >= 1, got {diffusion_steps}")
    features = as_value(features)
    weights = as_value(weights)
    if features.data.ndim < 2:
        raise ShapeError(f"features must be (..., P, D), got {features.data.shape}")
    nodes, d_in = features.data.shape[-2:]

    matrices = [s.matrix if isinstance(s, GraphSupport) else np.asarray(s, dtype=np.float64) for s in supports]
    for matrix in matrices:
        if matrix.shape != (nodes, nodes):
            raise ShapeError(f"Support of shape {matrix.shape} does not match {nodes} nodes")

    terms = [features] if include_self else []
    for matrix in matrices:
        support = ops.constant(matrix)
        current = features
        for _ in range(diffusion_steps):
            current = ops.matmul(support, current)
            terms.append(current)
    if not terms:
        raise ShapeError("graph_conv needs at least one support or include_self")

    expected = len(terms) * d_in
    if weights.data.ndim != 2 or weights.data.shape[0] != expected:
        raise ShapeError(
            f"Weights of shape {weights.data.shape} do not match {len(terms)} terms "
            f"of {d_in} input features"
        )
    stacked = terms[0] if len(terms) == 1 else ops.concat(terms, axis=-1)
    return ops.matmul(stacked, weights)
