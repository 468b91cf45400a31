"""Tests for dataset loading, windowing and the synthetic generators."""

import json
import logging

import numpy as np
import pytest
from scipy.stats import norm

from stuq.config import GeneratorSpec, WindowSchema
from stuq.core.enums import GeneratorKind
from stuq.core.errors import ConfigError, ParseError, ShapeError, ValidationError
from stuq.services.datasets import Dataset, check_disjoint, load_dataset, write_dataset
from stuq.services.synthetic import make_synthetic, true_quantile
from stuq.spatial.graph import SpatialGraph


def series(steps=20, nodes=2, features=1, schema=None, seed=0):
    values = np.random.default_rng(seed).normal(size=(steps, nodes, features))
    return Dataset(
        values,
        [str(t) for t in range(steps)],
        [f"n{p}" for p in range(nodes)],
        schema or WindowSchema(history_length=2, horizon=1, split=(0.6, 0.2, 0.2)),
    )


class TestWindowing:
    def test_split_bounds(self):
        assert series().split_bounds() == [(0, 12), (12, 16), (16, 20)]

    def test_window_counts_stay_inside_splits(self):
        dataset = series()
        assert dataset.window_count("train") == 10
        np.testing.assert_array_equal(dataset.window_starts("validation"), [12, 13])
        np.testing.assert_array_equal(dataset.window_starts("test"), [16, 17])

    def test_splits_share_no_timestamp(self):
        check_disjoint(series(steps=200))

    def test_stride_starts_on_global_multiples(self):
        schema = WindowSchema(history_length=2, horizon=1, stride=3, split=(0.6, 0.2, 0.2))
        starts = series(steps=40, schema=schema).window_starts("validation")
        assert np.all(starts % 3 == 0)
        assert starts[0] >= 24

    def test_window_contents(self):
        dataset = series()
        windows = dataset.windows("train")
        np.testing.assert_allclose(windows.inputs[3], dataset.normalize(dataset.values[3:5]))
        np.testing.assert_allclose(windows.targets[3], dataset.normalize(dataset.values[5:6]))

    def test_unknown_split(self):
        with pytest.raises(ValidationError):
            series().window_starts("holdout")

    def test_target_times(self):
        assert series().target_times("test") == [["18"], ["19"]]


class TestNormalization:
    def test_statistics_use_training_rows_only(self):
        dataset = series()
        train = dataset.values[:12]
        np.testing.assert_allclose(dataset.stats.mean, train.mean(axis=(0, 1)))
        np.testing.assert_allclose(dataset.stats.std, train.std(axis=(0, 1)))

    def test_round_trip(self):
        dataset = series(features=3)
        np.testing.assert_allclose(dataset.denormalize(dataset.normalize(dataset.values)), dataset.values)

    def test_constant_feature_keeps_unit_scale(self):
        values = np.ones((10, 2, 1))
        dataset = Dataset(values, [str(t) for t in range(10)], ["a", "b"])
        assert dataset.stats.std[0] == 1.0
        np.testing.assert_allclose(dataset.normalize(values), 0.0)

    def test_missing_cells_are_masked_and_zero_filled(self):
        dataset = series()
        dataset.values[6, 1, 0] = np.nan
        dataset.__post_init__()
        windows = dataset.windows("train")
        assert not windows.mask[4, 0, 1, 0]
        assert windows.targets[4, 0, 1, 0] == 0.0
        assert windows.inputs[5, 1, 1, 0] == 0.0


class TestDatasetValidation:
    def test_timestamp_count(self):
        with pytest.raises(ShapeError):
            Dataset(np.zeros((4, 2, 1)), ["0", "1"], ["a", "b"])

    def test_adjacency_size(self):
        with pytest.raises(ValidationError):
            Dataset(np.zeros((4, 2, 1)), list("0123"), ["a", "b"], graph=SpatialGraph(np.eye(3)))

    def test_grid_must_cover_nodes(self):
        with pytest.raises(ValidationError):
            Dataset(np.zeros((4, 6, 1)), list("0123"), list("abcdef"), grid_shape=(2, 2))

    def test_infinite_values(self):
        values = np.zeros((4, 1, 1))
        values[2] = np.inf
        with pytest.raises(ValidationError):
            Dataset(values, list("0123"), ["a"])


class TestLoadDataset:
    def test_long_format_with_gaps(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text(
            "timestamp,node_id,feat_0,feat_1\n"
            "0,a,1,10\n0,b,2,20\n"
            "1,a,3,\n"
            "2,a,5,50\n2,b,6,60\n"
        )
        dataset = load_dataset(path)
        assert dataset.values.shape == (3, 2, 2)
        assert dataset.node_ids == ["a", "b"]
        assert np.isnan(dataset.values[1, 0, 1])
        assert np.all(np.isnan(dataset.values[1, 1]))
        assert dataset.values[2, 1, 1] == 60.0

    def test_datetime_timestamps(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,node_id,feat_0\n2024-01-01 00:00,a,1\n2024-01-01 01:00,a,2\n")
        assert load_dataset(path).timestamps == ["2024-01-01 00:00", "2024-01-01 01:00"]

    def test_header_must_name_features(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("time,node,value\n0,a,1\n")
        with pytest.raises(ParseError, match="line 1"):
            load_dataset(path)

    def test_timestamps_must_increase_per_node(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,node_id,feat_0\n0,a,1\n1,a,2\n1,a,3\n")
        with pytest.raises(ParseError, match="line 4"):
            load_dataset(path)

    def test_non_numeric_cell_reports_line(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,node_id,feat_0\n0,a,1\n1,a,high\n")
        with pytest.raises(ParseError, match="line 3"):
            load_dataset(path)

    def test_adjacency_reordered_to_node_ids(self, tmp_path):
        series_path = tmp_path / "series.csv"
        series_path.write_text("timestamp,node_id,feat_0\n0,a,1\n0,b,2\n1,a,3\n1,b,4\n")
        adjacency = tmp_path / "adjacency.csv"
        adjacency.write_text("b,a\n0,5\n7,0\n")
        dataset = load_dataset(series_path, adjacency=adjacency)
        np.testing.assert_array_equal(dataset.graph.adjacency, [[0.0, 7.0], [5.0, 0.0]])

    def test_write_then_load(self, tmp_path):
        dataset = make_synthetic(GeneratorSpec(GeneratorKind.GRAPH_DIFFUSION, nodes=4, steps=30), seed=3)
        dataset.values[5, 2, 0] = np.nan
        paths = write_dataset(dataset, tmp_path)
        loaded = load_dataset(paths["series"], adjacency=paths["adjacency"])
        np.testing.assert_array_equal(loaded.values, dataset.values)
        np.testing.assert_array_equal(loaded.graph.adjacency, dataset.graph.adjacency)
        truth = json.loads(paths["ground_truth"].read_text())
        assert truth["generator"] == "graph-diffusion"
        assert truth["seed"] == 3


class TestSynthetic:
    def test_same_seed_same_series(self):
        spec = GeneratorSpec(GeneratorKind.SEASONAL_GRID, steps=50, grid_width=4, grid_height=3)
        np.testing.assert_array_equal(make_synthetic(spec, 5).values, make_synthetic(spec, 5).values)
        assert not np.array_equal(make_synthetic(spec, 5).values, make_synthetic(spec, 6).values)

    def test_noiseless_diffusion_follows_support(self):
        spec = GeneratorSpec(GeneratorKind.GRAPH_DIFFUSION, nodes=6, steps=10, noise=0.0, decay=0.9)
        dataset = make_synthetic(spec, 0)
        support = dataset.ground_truth["support"]
        np.testing.assert_allclose(dataset.values[4], 0.9 * support @ dataset.values[3])

    def test_seasonal_grid_shape_and_period(self):
        spec = GeneratorSpec(
            GeneratorKind.SEASONAL_GRID, steps=60, grid_width=4, grid_height=3, features=2, noise=0.0, period=12.0
        )
        dataset = make_synthetic(spec, 1)
        assert dataset.grid_shape == (4, 3)
        assert dataset.values.shape == (60, 12, 2)
        np.testing.assert_allclose(dataset.values[12:], dataset.values[:-12], atol=1e-12)

    def test_heteroscedastic_windows_recover_pairs(self):
        spec = GeneratorSpec(GeneratorKind.HETEROSCEDASTIC_SCALAR, steps=40, noise=0.5, amplitude=1.5)
        dataset = make_synthetic(spec, 2)
        windows = dataset.windows()
        assert len(windows) == 20
        x = dataset.denormalize(windows.inputs[:, 0, 0])
        y = dataset.denormalize(windows.targets[:, 0, 0])
        np.testing.assert_allclose(x, dataset.values[0::2, 0])
        np.testing.assert_allclose(y, dataset.values[1::2, 0])
        assert np.all(np.abs(x) <= 1.5)

    def test_recorded_quantile_offsets(self):
        spec = GeneratorSpec(GeneratorKind.HETEROSCEDASTIC_SCALAR, steps=10, noise=0.5)
        offsets = make_synthetic(spec, 0).ground_truth["quantile_offsets"]
        assert offsets["0.975"] == pytest.approx(0.5 * norm.ppf(0.975))
        assert offsets["0.5"] == 0.0

    def test_true_quantile_with_slope(self):
        value = true_quantile(np.array([2.0]), 0.975, noise=0.5, noise_slope=1.0)
        assert value[0] == pytest.approx(2.0 + 1.5 * norm.ppf(0.975))

    def test_odd_stride_warns(self, caplog):
        spec = GeneratorSpec(GeneratorKind.HETEROSCEDASTIC_SCALAR, steps=20)
        with caplog.at_level(logging.WARNING):
            make_synthetic(spec, 0, WindowSchema(history_length=1, horizon=1, stride=1))
        assert "Odd stride" in caplog.text

    def test_unknown_generator(self):
        with pytest.raises(ConfigError):
            GeneratorSpec("random-walk-field")
