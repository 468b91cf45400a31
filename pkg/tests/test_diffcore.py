"""Tests for the reverse-mode differentiation substrate."""

import numpy as np
import pytest

from stuq.core.enums import OptimizerKind
from stuq.core.errors import NonFiniteError, ShapeError, UnsupportedPrimitiveError, ValidationError
from stuq.diffcore import (
    PRIMITIVES,
    OptimizerState,
    Shape,
    apply,
    backward,
    build_default_registry,
    clip_gradients,
    finite_difference_check,
    global_norm,
    ops,
    record,
    step,
)
from stuq.services.oracles import gradient_oracle


class TestShape:
    def test_size_is_product(self):
        assert Shape((2, 3, 4)).size == 24

    def test_rejects_zero_extent(self):
        with pytest.raises(ValidationError):
            Shape((2, 0))


class TestRecord:
    def test_constant_program_records_nothing(self):
        tape = record(lambda: ops.constant(np.ones(3)))
        assert tape.dependencies == 0

    def test_replay_is_deterministic(self):
        x = ops.parameter(3.0, name="x")
        tape = record(lambda: ops.mul(x, x))
        assert tape.output.item() == 9.0
        assert tape.replay().item() == 9.0

    def test_composed_program_replays_bit_identically(self):
        rng = np.random.default_rng(7)
        w = ops.parameter(rng.normal(size=(4, 3)), name="w")
        x = rng.normal(size=(5, 4))
        tape = record(lambda: ops.tanh(ops.matmul(x, w)))
        first = tape.output.numpy().copy()
        np.testing.assert_array_equal(tape.replay().numpy(), first)

    def test_unsupported_primitive_is_named(self):
        with pytest.raises(UnsupportedPrimitiveError, match="fft"):
            record(lambda: apply("fft", np.ones(3)))

    def test_tape_uses_its_own_registry(self):
        registry = build_default_registry()
        registry.unregister("sigmoid")
        assert "sigmoid" not in registry and "add" in registry
        assert len(registry) == len(PRIMITIVES) - 1
        x = ops.parameter(np.zeros(2), name="x")
        with pytest.raises(UnsupportedPrimitiveError, match="sigmoid"):
            record(lambda: ops.sigmoid(x), registry=registry)
        assert record(lambda: ops.sum(ops.sigmoid(x))).output.item() == pytest.approx(1.0)


    def test_non_finite_forward_is_an_error(self):
        x = ops.parameter(np.array([1.0, 0.0]), name="x")
        with pytest.raises(NonFiniteError):
            record(lambda: ops.div(1.0, x))


class TestBackward:
    def test_sum_gives_ones(self):
        theta = ops.parameter(np.arange(6.0).reshape(2, 3), name="theta")
        tape = record(lambda: ops.sum(theta))
        grads = backward(tape, tape.output, {"theta": theta})
        np.testing.assert_array_equal(grads["theta"], np.ones((2, 3)))

    def test_half_squared_norm(self):
        theta = ops.parameter(np.array([1.0, 2.0]), name="theta")
        tape = record(lambda: ops.mul(ops.sum(ops.square(theta)), 0.5))
        grads = backward(tape, tape.output, {"theta": theta})
        np.testing.assert_allclose(grads["theta"], [1.0, 2.0])

    def test_untouched_parameter_gets_exact_zeros(self):
        used = ops.parameter(np.ones(3), name="used")
        unused = ops.parameter(np.ones((2, 2)), name="unused")
        tape = record(lambda: ops.sum(used))
        grads = backward(tape, tape.output, {"used": used, "unused": unused})
        np.testing.assert_array_equal(grads["unused"], np.zeros((2, 2)))

    def test_loss_must_be_scalar(self):
        theta = ops.parameter(np.ones(3), name="theta")
        tape = record(lambda: ops.mul(theta, 2.0))
        with pytest.raises(ValidationError):
            backward(tape, tape.output, {"theta": theta})

    def test_accumulation_is_linear(self):
        rng = np.random.default_rng(3)
        theta = ops.parameter(rng.normal(size=4), name="theta")
        first = lambda: ops.sum(ops.tanh(theta))
        second = lambda: ops.sum(ops.square(theta))
        combined = record(lambda: ops.add(first(), second()))
        separate = [record(p) for p in (first, second)]
        total = backward(combined, combined.output, {"theta": theta})["theta"]
        parts = sum(backward(t, t.output, {"theta": theta})["theta"] for t in separate)
        np.testing.assert_allclose(total, parts, rtol=1e-12)

    def test_indicator_is_constant(self):
        theta = ops.parameter(np.array([0.5, -0.5]), name="theta")
        tape = record(lambda: ops.sum(ops.mul(theta, ops.greater(theta, 0.0))))
        grads = backward(tape, tape.output, {"theta": theta})
        np.testing.assert_array_equal(grads["theta"], [1.0, 0.0])


class TestFiniteDifferenceCheck:
    def test_quadratic(self):
        theta = ops.parameter(np.array([0.3, -1.2, 2.0]), name="theta")
        error = finite_difference_check(lambda: ops.sum(ops.square(theta)), {"theta": theta})
        assert error < 1e-6

    def test_linear(self):
        theta = ops.parameter(np.array([0.3, -1.2]), name="theta")
        error = finite_difference_check(lambda: ops.sum(ops.mul(theta, 3.0)), {"theta": theta})
        assert error < 1e-10

    def test_relu_away_from_zero(self):
        theta = ops.parameter(np.array([0.7, -0.4, 1.5]), name="theta")
        error = finite_difference_check(lambda: ops.sum(ops.relu(theta)), {"theta": theta})
        assert error < 1e-6

    def test_step_must_be_positive(self):
        theta = ops.parameter(np.ones(2), name="theta")
        with pytest.raises(ValidationError):
            finite_difference_check(lambda: ops.sum(theta), {"theta": theta}, step=0.0)

    def test_every_primitive_and_training_loss(self):
        report = gradient_oracle(seed=0)
        assert report.passed, report.detail
        assert report.worst < 1e-4


class TestOptimizer:
    def test_sgd_step(self):
        theta = ops.parameter(np.array([1.0]), name="theta")
        state = OptimizerState(OptimizerKind.SGD, learning_rate=0.1, clip_norm=None)
        step(state, {"theta": theta}, {"theta": np.array([1.0])})
        np.testing.assert_allclose(theta.data, [0.9])

    @pytest.mark.parametrize("kind", list(OptimizerKind))
    def test_zero_gradient_is_fixed_point(self, kind):
        theta = ops.parameter(np.array([1.0, -2.0]), name="theta")
        step(OptimizerState(kind), {"theta": theta}, {"theta": np.zeros(2)})
        np.testing.assert_array_equal(theta.data, [1.0, -2.0])

    def test_clipping_halves_norm_ten_gradient(self):
        gradient = {"a": np.array([6.0]), "b": np.array([8.0])}
        clipped = clip_gradients(gradient, 5.0)
        np.testing.assert_allclose(clipped["a"], [3.0])
        np.testing.assert_allclose(clipped["b"], [4.0])
        assert global_norm(clipped) == pytest.approx(5.0)

    def test_clipping_keeps_direction(self):
        rng = np.random.default_rng(11)
        gradient = {"g": rng.normal(size=10) * 100}
        clipped = clip_gradients(gradient, 1.0)["g"]
        cosine = clipped @ gradient["g"] / (np.linalg.norm(clipped) * np.linalg.norm(gradient["g"]))
        assert cosine == pytest.approx(1.0)

    def test_adam_first_step_moves_by_learning_rate(self):
        theta = ops.parameter(np.array([1.0, 1.0]), name="theta")
        state = OptimizerState(OptimizerKind.ADAM, learning_rate=0.01, clip_norm=None)
        step(state, {"theta": theta}, {"theta": np.array([3.0, -0.5])})
        np.testing.assert_allclose(theta.data, [0.99, 1.01], rtol=1e-6)
        assert state.first_moment["theta"].shape == (2,)

    def test_shape_mismatch(self):
        theta = ops.parameter(np.ones(2), name="theta")
        with pytest.raises(ShapeError):
            step(OptimizerState(), {"theta": theta}, {"theta": np.ones(3)})
