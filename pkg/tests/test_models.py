"""Tests for the grid and graph recurrent forecasters."""

import numpy as np
import pytest

from stuq.core.enums import CellKind, Gating, HeadKind, SupportKind
from stuq.core.errors import ConfigError, ShapeError, ValidationError
from stuq.diffcore import finite_difference_check, ops
from stuq.models.base import ModelConfig, forecast
from stuq.models.dropout import apply_dropout_masks, dropout_masks, dropped_fraction
from stuq.models.factory import ModelFactory
from stuq.models.graph import dense_cell_step, graph_cell_step
from stuq.models.grid import grid_cell_step
from stuq.spatial.graph import SpatialGraph


def _params(**arrays):
    return {name.replace("__", "."): ops.parameter(value, name=name) for name, value in arrays.items()}


def graph_model(head=HeadKind.POINT, hidden=4, horizon=2, nodes=3, seed=0, **kwargs):
    config = ModelConfig(
        cell_kind=CellKind.GRAPH_CONV, nodes=nodes, features=1, hidden_units=hidden,
        horizon=horizon, head_kind=head, **kwargs,
    )
    adjacency = np.ones((nodes, nodes)) - np.eye(nodes)
    return ModelFactory.create(config, SpatialGraph(adjacency), seed=seed)


class TestModelConfig:
    def test_spline_head_width(self):
        assert ModelConfig(head_kind=HeadKind.SPLINE_11).head_width == 11

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigError):
            ModelConfig(cell_kind=CellKind.GRID_CONV, nodes=4, grid_shape=(2, 2), kernel_size=2)

    def test_grid_shape_must_cover_nodes(self):
        with pytest.raises(ConfigError):
            ModelConfig(cell_kind=CellKind.GRID_CONV, nodes=5, grid_shape=(2, 2))

    def test_dict_round_trip(self):
        config = ModelConfig(cell_kind=CellKind.GRID_CONV, nodes=6, grid_shape=(2, 3), head_kind=HeadKind.QUANTILE_3)
        assert ModelConfig.from_dict(config.to_dict()) == config


class TestParameterShapes:
    def test_graph_golden_count(self):
        assert graph_model().parameter_count == 269

    def test_grid_golden_shapes(self):
        config = ModelConfig(
            cell_kind=CellKind.GRID_CONV, nodes=6, features=2, hidden_units=4,
            grid_shape=(2, 3), gating=Gating.PLAIN,
        )
        model = ModelFactory.create(config)
        shapes = model.parameter_shapes()
        assert shapes["encoder.0.wx"] == (3, 3, 2, 4)
        assert shapes["decoder.0.wh"] == (3, 3, 4, 4)
        assert shapes["head.w"] == (4, 2)
        assert model.parameter_count == 450

    def test_count_is_a_function_of_config(self):
        assert graph_model(seed=1).parameter_count == graph_model(seed=2).parameter_count

    def test_snapshot_round_trip(self):
        model = graph_model(seed=3)
        rebuilt = ModelFactory.from_snapshot(
            model.config, model.snapshot(), SpatialGraph(np.ones((3, 3)) - np.eye(3)), (SupportKind.RANDOM_WALK,)
        )
        history = np.random.default_rng(0).normal(size=(2, 4, 3, 1))
        np.testing.assert_array_equal(rebuilt.forecast(history)["point"], model.forecast(history)["point"])


class TestGridCell:
    def test_zero_weights_give_half(self):
        params = _params(cell__wx=np.zeros((3, 3, 2, 4)), cell__wh=np.zeros((3, 3, 4, 4)), cell__b=np.zeros(4))
        out = grid_cell_step(np.zeros((5, 5, 4)), np.ones((5, 5, 2)), params, gating=Gating.PLAIN)
        np.testing.assert_allclose(out.numpy(), 0.5)

    def test_single_cell_is_scalar_rnn(self):
        w_x, w_h, b, h, x = 0.7, -0.3, 0.1, 0.4, 2.0
        params = _params(
            cell__wx=np.full((1, 1, 1, 1), w_x), cell__wh=np.full((1, 1, 1, 1), w_h), cell__b=np.array([b])
        )
        out = grid_cell_step(np.full((1, 1, 1), h), np.full((1, 1, 1), x), params, gating=Gating.PLAIN)
        expected = 1.0 / (1.0 + np.exp(-(w_h * h + w_x * x + b)))
        assert out.numpy().item() == pytest.approx(expected, abs=1e-12)

    def test_periodic_translation_equivariance(self):
        rng = np.random.default_rng(4)
        params = _params(
            cell__wx=rng.normal(size=(3, 3, 1, 2)), cell__wh=rng.normal(size=(3, 3, 2, 2)), cell__b=rng.normal(size=2)
        )
        state = rng.normal(size=(6, 5, 2))
        field = rng.normal(size=(6, 5, 1))
        base = grid_cell_step(state, field, params, gating=Gating.PLAIN, padding="periodic").numpy()
        shift = (2, -1)
        moved = grid_cell_step(
            np.roll(state, shift, axis=(0, 1)), np.roll(field, shift, axis=(0, 1)),
            params, gating=Gating.PLAIN, padding="periodic",
        ).numpy()
        np.testing.assert_allclose(moved, np.roll(base, shift, axis=(0, 1)), atol=1e-12)

    def test_shape_mismatch(self):
        params = _params(cell__wx=np.zeros((3, 3, 1, 2)), cell__wh=np.zeros((3, 3, 2, 2)), cell__b=np.zeros(2))
        with pytest.raises(ShapeError):
            grid_cell_step(np.zeros((4, 4, 2)), np.zeros((3, 4, 1)), params, gating=Gating.PLAIN)


class TestGraphCell:
    @pytest.mark.parametrize("gating", list(Gating))
    def test_identity_support_equals_dense_cell(self, gating):
        rng = np.random.default_rng(6)
        model = graph_model(hidden=3, diffusion_steps=1, gating=gating, seed=2)
        params = {k: v for k, v in model.parameters.items() if k.startswith("encoder.0.")}
        state, inputs = rng.normal(size=(3, 3)), rng.normal(size=(3, 1))
        out = graph_cell_step(state, inputs, [np.eye(3)], params, "encoder.0", gating, diffusion_steps=1)
        reference = dense_cell_step(state, inputs, params, "encoder.0", gating)
        np.testing.assert_allclose(out.numpy(), reference.numpy(), rtol=1e-12)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(8)
        model = graph_model(hidden=4, nodes=5, seed=5)
        params = {k: v for k, v in model.parameters.items() if k.startswith("encoder.0.")}
        support = rng.uniform(size=(5, 5))
        state, inputs = rng.normal(size=(5, 4)), rng.normal(size=(5, 1))
        order = rng.permutation(5)
        base = graph_cell_step(state, inputs, [support], params, "encoder.0", diffusion_steps=2).numpy()
        moved = graph_cell_step(
            state[order], inputs[order], [support[np.ix_(order, order)]], params, "encoder.0", diffusion_steps=2
        ).numpy()
        np.testing.assert_allclose(moved, base[order], atol=1e-12)

    def test_relabelled_model_permutes_forecast(self):
        rng = np.random.default_rng(9)
        config = ModelConfig(cell_kind=CellKind.GRAPH_CONV, nodes=4, features=1, hidden_units=3, horizon=2)
        model = ModelFactory.create(config, SpatialGraph(rng.uniform(size=(4, 4))), seed=1)
        order = np.array([2, 0, 3, 1])
        history = rng.normal(size=(3, 4, 1))
        base = model.forecast(history)
        moved = model.permuted(order).forecast(history[:, order])
        for label in base.labels:
            np.testing.assert_allclose(moved[label], base[label][:, order], atol=1e-12)

    def test_two_node_hand_value(self):
        a, b, c = 0.5, -1.5, 0.25
        params = _params(cell__wx=np.array([[a]]), cell__wh=np.array([[b]]), cell__b=np.array([c]))
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        state, inputs = np.array([[0.2], [0.6]]), np.array([[1.0], [3.0]])
        out = graph_cell_step(state, inputs, [swap], params, gating=Gating.PLAIN).numpy()
        sigmoid = lambda z: 1.0 / (1.0 + np.exp(-z))
        expected = [[sigmoid(b * 0.6 + a * 3.0 + c)], [sigmoid(b * 0.2 + a * 1.0 + c)]]
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_support_size_mismatch(self):
        params = _params(cell__wx=np.zeros((1, 1)), cell__wh=np.zeros((1, 1)), cell__b=np.zeros(1))
        with pytest.raises(ShapeError):
            graph_cell_step(np.zeros((2, 1)), np.zeros((2, 1)), [np.eye(3)], params, gating=Gating.PLAIN)


class TestForecast:
    def test_point_head_has_one_output(self):
        out = graph_model().forecast(np.zeros((4, 3, 1)))
        assert out.labels == ("point",)
        assert out["point"].shape == (2, 3, 1)

    def test_spline_head_has_eleven_parameters(self):
        out = graph_model(head=HeadKind.SPLINE_11).forecast(np.zeros((1, 4, 3, 1)))
        assert out["spline"].shape == (1, 2, 3, 1, 11)

    def test_quantile_heads_keep_their_order(self):
        out = graph_model(head=HeadKind.QUANTILE_3).forecast(np.zeros((4, 3, 1)))
        assert out.labels == ("q_lower", "q_median", "q_upper")

    def test_feedback_modes_agree_on_own_outputs(self):
        model = graph_model(horizon=3, seed=4)
        history = np.random.default_rng(1).normal(size=(2, 5, 3, 1))
        free = model.forecast(history)["point"]
        forced = model.forecast(history, targets=free)["point"]
        np.testing.assert_array_equal(forced, free)

    def test_horizon_mismatch(self):
        with pytest.raises(ValidationError):
            forecast(graph_model(), np.zeros((4, 3, 1)), horizon=5)

    def test_history_shape_checked(self):
        with pytest.raises(ShapeError):
            graph_model().forecast(np.zeros((4, 2, 1)))

    def test_gradients_match_finite_differences(self):
        model = graph_model(seed=9)
        history = np.random.default_rng(2).normal(size=(2, 3, 3, 1))
        error = finite_difference_check(lambda: ops.sum(ops.square(model.forward(history))), model.parameters)
        assert error < 1e-4


class TestDropout:
    def test_rate_zero_is_identity(self):
        model = graph_model()
        view = apply_dropout_masks(model, 0.0, seed=1)
        for name, value in model.parameters.items():
            np.testing.assert_array_equal(view.parameters[name].data, value.data)

    def test_dropped_fraction_near_rate(self):
        model = graph_model(hidden=32)
        view = apply_dropout_masks(model, 0.05, seed=3)
        assert 0.04 <= dropped_fraction(model, view) <= 0.06

    def test_same_seed_same_masks(self):
        model = graph_model()
        first, second = dropout_masks(model, 0.2, seed=7), dropout_masks(model, 0.2, seed=7)
        for name in first:
            np.testing.assert_array_equal(first[name], second[name])

    def test_biases_and_base_untouched(self):
        model = graph_model()
        before = model.snapshot()
        view = apply_dropout_masks(model, 0.5, seed=0)
        for name, value in model.parameters.items():
            np.testing.assert_array_equal(value.data, before[name])
            if name.endswith("_b") or name.endswith(".b"):
                np.testing.assert_array_equal(view.parameters[name].data, before[name])

    def test_rate_out_of_range(self):
        with pytest.raises(ValidationError):
            apply_dropout_masks(graph_model(), 1.0, seed=0)
