"""Tests for spatial supports, graph convolution and grid interpolation."""

import numpy as np
import pytest

from stuq.core.enums import SupportKind
from stuq.core.errors import ParseError, ShapeError, ValidationError
from stuq.diffcore import backward, ops, record
from stuq.spatial.conv import graph_conv
from stuq.spatial.graph import (
    SpatialGraph,
    build_supports,
    gaussian_kernel_adjacency,
    normalized_laplacian_support,
    random_walk_support,
    reverse_random_walk_support,
)
from stuq.spatial.interpolation import StationSet, grid_cell_centers, inverse_distance_interpolate
from stuq.spatial.io import read_adjacency_csv, read_station_csv, write_matrix_csv


def _random_graph(rng, nodes, symmetric=False):
    adjacency = rng.uniform(size=(nodes, nodes)) * (rng.uniform(size=(nodes, nodes)) < 0.4)
    if symmetric:
        adjacency = adjacency + adjacency.T
    return SpatialGraph(adjacency)


class TestGaussianKernel:
    def test_zero_distance_is_one(self):
        graph = gaussian_kernel_adjacency(np.zeros((3, 3)), sigma_squared=1.0)
        np.testing.assert_array_equal(graph.adjacency, np.ones((3, 3)))

    def test_printed_kernel_uses_distance(self):
        distances = np.array([[0.0, 2.0], [2.0, 0.0]])
        graph = gaussian_kernel_adjacency(distances, sigma_squared=2.0)
        assert graph.adjacency[0, 1] == pytest.approx(0.367879, abs=1e-6)
        assert graph.adjacency[0, 0] == 1.0

    def test_threshold_zeroes_small_entries(self):
        distances = np.array([[0.0, 1.0, 10.0], [1.0, 0.0, 10.0], [10.0, 10.0, 0.0]])
        graph = gaussian_kernel_adjacency(distances, sigma_squared=1.0, sparsity_threshold=0.1)
        assert graph.adjacency[0, 2] == 0.0
        assert graph.adjacency[0, 1] == pytest.approx(np.exp(-1.0))

    def test_negative_distance_rejected(self):
        with pytest.raises(ValidationError):
            gaussian_kernel_adjacency(np.array([[0.0, -1.0], [1.0, 0.0]]), sigma_squared=1.0)


class TestSupports:
    def test_random_walk_identity(self):
        support = random_walk_support(SpatialGraph(np.eye(4)))
        np.testing.assert_array_equal(support.matrix, np.eye(4))

    def test_random_walk_row_normalizes(self):
        support = random_walk_support(SpatialGraph(np.array([[0.0, 2.0], [1.0, 0.0]])))
        np.testing.assert_array_equal(support.matrix, [[0.0, 1.0], [1.0, 0.0]])

    def test_zero_degree_row_stays_zero(self):
        support = random_walk_support(SpatialGraph(np.array([[0.0, 0.0], [1.0, 1.0]])))
        np.testing.assert_array_equal(support.matrix[0], [0.0, 0.0])

    def test_random_walk_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        for nodes in (2, 10, 50):
            graph = _random_graph(rng, nodes)
            support = random_walk_support(graph)
            active = graph.adjacency.sum(axis=1) > 0
            np.testing.assert_allclose(support.matrix[active].sum(axis=1), 1.0, atol=1e-12)

    def test_reverse_walk_uses_transpose(self):
        adjacency = np.array([[0.0, 2.0], [0.0, 0.0]])
        support = reverse_random_walk_support(SpatialGraph(adjacency))
        np.testing.assert_array_equal(support.matrix, [[0.0, 0.0], [1.0, 0.0]])

    def test_laplacian_self_loops_only(self):
        support = normalized_laplacian_support(SpatialGraph(np.eye(3)))
        np.testing.assert_allclose(support.matrix, np.zeros((3, 3)), atol=1e-15)

    def test_laplacian_two_nodes(self):
        support = normalized_laplacian_support(SpatialGraph(np.array([[0.0, 1.0], [1.0, 0.0]])))
        np.testing.assert_allclose(support.matrix, [[1.0, -1.0], [-1.0, 1.0]])

    def test_laplacian_isolated_node_identity_row(self):
        adjacency = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        support = normalized_laplacian_support(SpatialGraph(adjacency))
        np.testing.assert_array_equal(support.matrix[2], [0.0, 0.0, 1.0])

    def test_laplacian_spectrum_in_zero_two(self):
        rng = np.random.default_rng(5)
        for nodes in range(2, 21):
            support = normalized_laplacian_support(_random_graph(rng, nodes, symmetric=True))
            eigenvalues = np.linalg.eigvalsh(support.matrix)
            assert eigenvalues.min() >= -1e-9
            assert eigenvalues.max() <= 2.0 + 1e-9

    def test_build_supports_keeps_order(self):
        graph = SpatialGraph(np.array([[0.0, 1.0], [0.0, 0.0]]))
        kinds = [SupportKind.REVERSE_RANDOM_WALK, SupportKind.RANDOM_WALK]
        assert [s.kind for s in build_supports(graph, kinds)] == kinds

    def test_negative_adjacency_rejected(self):
        with pytest.raises(ValidationError):
            SpatialGraph(np.array([[0.0, -1.0], [1.0, 0.0]]))


class TestGraphConv:
    def test_identity_support_is_dense_layer(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            features = rng.normal(size=(4, 3))
            weights = rng.normal(size=(3, 2))
            out = graph_conv(weights, features, [np.eye(4)], diffusion_steps=1)
            np.testing.assert_allclose(out.numpy(), features @ weights, rtol=1e-12)

    def test_two_node_swap(self):
        out = graph_conv(np.array([[1.0]]), np.array([[1.0], [2.0]]), [np.array([[0.0, 1.0], [1.0, 0.0]])])
        np.testing.assert_array_equal(out.numpy(), [[2.0], [1.0]])

    def test_zero_weights_give_zero_output_and_gradient(self):
        features = ops.parameter(np.array([[1.0], [2.0], [3.0]]), name="x")
        support = random_walk_support(SpatialGraph(np.ones((3, 3))))
        tape = record(lambda: ops.sum(graph_conv(np.zeros((2, 1)), features, [support], diffusion_steps=2)))
        assert tape.output.item() == 0.0
        grads = backward(tape, tape.output, {"x": features})
        np.testing.assert_array_equal(grads["x"], np.zeros((3, 1)))

    def test_include_self_adds_identity_block(self):
        features = np.array([[1.0], [2.0]])
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = graph_conv(np.array([[10.0], [1.0]]), features, [swap], diffusion_steps=1, include_self=True)
        np.testing.assert_array_equal(out.numpy(), [[12.0], [21.0]])

    def test_weight_rows_must_match_terms(self):
        with pytest.raises(ShapeError):
            graph_conv(np.ones((3, 1)), np.ones((2, 1)), [np.eye(2)], diffusion_steps=2)


class TestInterpolation:
    def test_single_station(self):
        stations = StationSet(np.array([[0.3, 0.3]]), np.array([7.0]))
        values = inverse_distance_interpolate(stations, grid_cell_centers(4, 4))
        np.testing.assert_allclose(values, 7.0)

    def test_equidistant_stations_average(self):
        stations = StationSet(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([10.0, 20.0]))
        values = inverse_distance_interpolate(stations, np.array([[1.0, 0.0]]))
        np.testing.assert_allclose(values, [[15.0]])

    def test_hand_weighted_value(self):
        stations = StationSet(np.array([[1.0, 0.0], [-2.0, 0.0]]), np.array([0.0, 30.0]))
        values = inverse_distance_interpolate(stations, np.array([[0.0, 0.0]]), epsilon=0.0)
        np.testing.assert_allclose(values, [[6.0]])

    def test_stays_within_station_range(self):
        rng = np.random.default_rng(2)
        stations = StationSet(rng.uniform(size=(8, 2)), rng.normal(size=(8, 2)))
        values = inverse_distance_interpolate(stations, grid_cell_centers(10, 6))
        assert values.shape == (60, 2)
        assert np.all(values >= stations.values.min(axis=0) - 1e-12)
        assert np.all(values <= stations.values.max(axis=0) + 1e-12)

    def test_duplicate_station_rejected(self):
        with pytest.raises(ValidationError):
            StationSet(np.array([[0.5, 0.5], [0.5, 0.5]]), np.array([1.0, 2.0]))

    def test_cell_centers_are_row_major(self):
        centers = grid_cell_centers(2, 3)
        np.testing.assert_allclose(centers[1], [0.25, 0.5])
        np.testing.assert_allclose(centers[3], [0.75, 1.0 / 6.0])


class TestCsv:
    def test_adjacency_round_trip(self, tmp_path):
        matrix = np.array([[0.0, 0.25], [1.0 / 3.0, 0.0]])
        path = write_matrix_csv(tmp_path / "adjacency.csv", matrix, ["a", "b"])
        np.testing.assert_array_equal(read_adjacency_csv(path, expected_nodes=2).adjacency, matrix)

    def test_wrong_node_count(self, tmp_path):
        path = write_matrix_csv(tmp_path / "adjacency.csv", np.eye(3))
        with pytest.raises(ParseError):
            read_adjacency_csv(path, expected_nodes=2)

    def test_bad_cell_reports_line(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        path.write_text("a,b\n0,1\n1,x\n")
        with pytest.raises(ParseError, match="line 3"):
            read_adjacency_csv(path)

    def test_station_file(self, tmp_path):
        path = tmp_path / "stations.csv"
        path.write_text("id,x,y,temp,wind\ns1,0.1,0.2,10,3\ns2,0.8,0.9,12,4\n")
        stations = read_station_csv(path)
        assert len(stations) == 2
        np.testing.assert_array_equal(stations.values, [[10.0, 3.0], [12.0, 4.0]])
