"""Synthetic spatiotemporal datasets with known generative parameters."""

from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import norm

from stuq.config import GeneratorSpec, WindowSchema
from stuq.core.enums import GeneratorKind
from stuq.core.errors import ConfigError
from stuq.methods.seeds import derive_rng
from stuq.spatial.graph import SpatialGraph, gaussian_kernel_adjacency, random_walk_support
from stuq.spatial.interpolation import StationSet, grid_cell_centers, inverse_distance_interpolate

from .datasets import Dataset

logger = logging.getLogger(__name__)

RECORDED_LEVELS = (0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975)
KERNEL_THRESHOLD = 0.1


def _distance_graph(positions: np.ndarray) -> SpatialGraph:
    """Gaussian kernel on squared distances, bandwidth from their spread."""
    squared = cdist(positions, positions, metric="sqeuclidean")
    off_diagonal = squared[~np.eye(len(positions), dtype=bool)]
    sigma_squared = float(off_diagonal.std()) if off_diagonal.size and off_diagonal.std() > 0 else 1.0
    return gaussian_kernel_adjacency(squared, sigma_squared, KERNEL_THRESHOLD)


def graph_diffusion(spec: GeneratorSpec, rng: np.random.Generator) -> dict:
    """x_{t+1} = decay · S x_t + noise · ε_t with S the random-walk support."""
    positions = rng.uniform(0.0, 1.0, size=(spec.nodes, 2))
    graph = _distance_graph(positions)
    support = random_walk_support(graph).matrix
    values = np.empty((spec.steps, spec.nodes, spec.features))
    values[0] = rng.standard_normal((spec.nodes, spec.features))
    for t in range(1, spec.steps):
        values[t] = spec.decay * (support @ values[t - 1])
        if spec.noise > 0:
            values[t] += spec.noise * rng.standard_normal((spec.nodes, spec.features))
    return {
        "values": values,
        "graph": graph,
        "truth": {"support": support, "decay": spec.decay, "noise": spec.noise, "positions": positions},
    }


def seasonal_grid(spec: GeneratorSpec, rng: np.random.Generator) -> dict:
    """Sinusoids with a spatial phase gradient plus IDW-smoothed station noise."""
    width, height = spec.grid_width, spec.grid_height
    cells = grid_cell_centers(width, height)
    stations = rng.uniform(0.0, 1.0, size=(spec.stations, 2))
    phase = np.pi * cells.sum(axis=1)
    offsets = 0.5 * np.pi * np.arange(spec.features)
    t = np.arange(spec.steps)[:, None, None]
    signal = spec.amplitude * np.sin(2.0 * np.pi * t / spec.period + phase[None, :, None] + offsets[None, None, :])

    station_noise = rng.normal(0.0, spec.noise, size=(spec.stations, spec.steps * spec.features))
    field = inverse_distance_interpolate(StationSet(stations, station_noise), cells)
    noise = field.reshape(len(cells), spec.steps, spec.features).transpose(1, 0, 2)
    return {
        "values": signal + noise,
        "graph": _distance_graph(cells),
        "grid_shape": (width, height),
        "truth": {
            "period": spec.period,
            "amplitude": spec.amplitude,
            "phase": phase,
            "feature_offsets": offsets,
            "stations": stations,
            "noise": spec.noise,
        },
    }


def heteroscedastic_scalar(spec: GeneratorSpec, rng: np.random.Generator) -> dict:
    """Independent pairs laid out as x_0, y_0, x_1, y_1, ... with y = x + σ(x)·ε.

    σ(x) = noise · (1 + noise_slope · |x|). Windows of history 1 and horizon 1
    at stride 2 recover the pairs.
    """
    pairs = spec.steps // 2
    x = rng.uniform(-spec.amplitude, spec.amplitude, size=pairs)
    scale = spec.noise * (1.0 + spec.noise_slope * np.abs(x))
    y = x + scale * rng.standard_normal(pairs)
    series = np.empty(2 * pairs)
    series[0::2] = x
    series[1::2] = y
    return {
        "values": series.reshape(-1, 1, 1),
        "graph": SpatialGraph(np.ones((1, 1))),
        "schema": WindowSchema(history_length=1, horizon=1, stride=2),
        "truth": {
            "noise": spec.noise,
            "noise_slope": spec.noise_slope,
            "x_range": [-spec.amplitude, spec.amplitude],
            "quantile_offsets": {f"{level:g}": spec.noise * float(norm.ppf(level)) for level in RECORDED_LEVELS},
        },
    }


def true_quantile(x: np.ndarray, level: float, noise: float, noise_slope: float = 0.0) -> np.ndarray:
    """Quantile of y given x for the heteroscedastic scalar generator."""
    return np.asarray(x) + noise * (1.0 + noise_slope * np.abs(x)) * norm.ppf(level)


GENERATORS: dict[GeneratorKind, Callable[[GeneratorSpec, np.random.Generator], dict]] = {
    GeneratorKind.GRAPH_DIFFUSION: graph_diffusion,
    GeneratorKind.SEASONAL_GRID: seasonal_grid,
    GeneratorKind.HETEROSCEDASTIC_SCALAR: heteroscedastic_scalar,
}


def make_synthetic(spec: GeneratorSpec, seed: int, schema: Optional[WindowSchema] = None) -> Dataset:
    """Generate a dataset; the same spec and seed always give the same values.

    The generator's own window layout is used unless ``schema`` overrides it.
    """
    generator = GENERATORS.get(spec.kind)
    if generator is None:
        raise ConfigError(f"Unknown generator: {spec.kind}")
    output = generator(spec, derive_rng(seed, f"synthetic-{spec.kind.value}"))
    values = output["values"]
    truth = {"generator": spec.kind.value, "seed": seed, "spec": spec.to_dict(), **output["truth"]}
    if schema is None:
        schema = output.get("schema", WindowSchema())
    elif "schema" in output and schema.stride % 2:
        logger.warning("Odd stride mixes the generator's (x, y) pairs across windows")

    steps, nodes, _ = values.shape
    logger.info(f"Generated {spec.kind.value} data: T = {steps}, P = {nodes}, seed {seed}")
    return Dataset(
        values,
        timestamps=[str(t) for t in range(steps)],
        node_ids=[f"n{p}" for p in range(nodes)],
        schema=schema,
        graph=output.get("graph"),
        grid_shape=output.get("grid_shape"),
        ground_truth=truth,
    )
