"""Spatial supports, graph convolution and grid interpolation."""

from .conv import diffusion_term_count, graph_conv
from .graph import (
    GraphSupport,
    SpatialGraph,
    build_supports,
    gaussian_kernel_adjacency,
    normalized_laplacian_support,
    random_walk_support,
    reverse_random_walk_support,
)
from .interpolation import StationSet, grid_cell_centers, inverse_distance_interpolate
from .io import read_adjacency_csv, read_matrix_csv, read_numeric_csv, read_station_csv, write_matrix_csv

__all__ = [
    "GraphSupport",
    "SpatialGraph",
    "StationSet",
    "build_supports",
    "diffusion_term_count",
    "gaussian_kernel_adjacency",
    "graph_conv",
    "grid_cell_centers",
    "inverse_distance_interpolate",
    "normalized_laplacian_support",
    "random_walk_support",
    "read_adjacency_csv",
    "read_matrix_csv",
    "read_numeric_csv",
    "read_station_csv",
    "reverse_random_walk_support",
    "write_matrix_csv",
]
