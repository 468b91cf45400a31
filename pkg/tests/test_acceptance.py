"""End-to-end checks against analytic targets. Run with ``pytest -m slow``."""

import dataclasses
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import norm

from conftest import HISTORY, HORIZON, NODES, model_config
from stuq.config import ExperimentConfig, load_settings
from stuq.core.enums import HeadKind
from stuq.core.windows import TrainingData, WindowSet
from stuq.methods import TrainConfig, mis_forecast
from stuq.methods.registry import METHODS
from stuq.methods.seeds import derive_rng
from stuq.methods.sgnht import SamplerConfig, run_chain
from stuq.scoring.intervals import empirical_interval
from stuq.services.experiment import prepare_run, run_experiment
from stuq.services.results_store import ResultsStore
from stuq.services.sweep import sample_complexity_sweep

PRESETS = Path(__file__).resolve().parent.parent / "presets"

# Smaller graph, windows and training than the method presets, for ten-seed sweeps.
SWEEP_OVERRIDES = {
    "DATA_NODES": "5",
    "DATA_STEPS": "300",
    "DATA_HISTORY": "6",
    "DATA_HORIZON": "3",
    "MODEL_HIDDEN": "8",
    "TRAIN_EPOCHS": "10",
    "TRAIN_PATIENCE": "3",
    "SAMPLER_BURN_IN": "300",
    "SAMPLER_DRAWS": "1",
}

pytestmark = pytest.mark.slow


def persistence_windows(count, noise, seed):
    rng = np.random.default_rng(seed)
    inputs = rng.normal(size=(count, HISTORY, NODES, 1))
    targets = np.repeat(inputs[:, -1:], HORIZON, axis=1) + noise * rng.normal(size=(count, HORIZON, NODES, 1))
    return WindowSet(inputs, targets, np.ones_like(targets, dtype=bool))


def constant_input_windows(count, seed):
    targets = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(count, HORIZON, NODES, 1))
    return WindowSet(np.zeros((count, HISTORY, NODES, 1)), targets, np.ones_like(targets, dtype=bool))


def test_upper_quantile_head_recovers_gaussian_quantile():
    settings = load_settings(PRESETS / "heteroscedastic.env", environ={})
    # 5 000 training pairs of y = x + N(0, 1)
    settings.update(DATA_NOISE="1.0", DATA_STEPS="14286")
    config = ExperimentConfig.from_settings(settings)
    prepared = prepare_run(config)
    dataset = prepared.dataset
    assert len(prepared.data.train) == pytest.approx(5000, abs=2)

    grid = np.linspace(-1.2, 1.2, 100)
    inputs = dataset.normalize(grid.reshape(-1, 1, 1, 1))
    context = dataclasses.replace(prepared.context, test_inputs=inputs)
    forecast = METHODS.require("quantile").run(context)

    upper = dataset.denormalize(forecast.upper)[:, 0, 0, 0]
    assert np.mean(np.abs(upper - (grid + norm.ppf(0.975)))) < 0.15
    assert np.all(forecast.lower <= forecast.upper)


def test_sampler_recovers_gaussian_posterior():
    precision, dimension = 1.0, 50
    config = SamplerConfig(step_size=0.01, burn_in=2000, thinning=200, draws_per_chain=20, chains=25)
    draws, thermostats = [], []
    for chain in range(config.chains):
        rng = derive_rng(0, "gaussian-target", chain)
        result = run_chain(lambda theta: precision * theta, rng.normal(size=dimension), config, rng)
        draws.append(result.draws)
        thermostats.append(result.max_abs_thermostat)

    pooled = np.concatenate(draws)
    assert pooled.shape == (25 * 20, dimension)
    assert np.var(pooled) == pytest.approx(1.0 / precision, rel=0.15)
    assert abs(np.mean(pooled)) < 0.05 * np.sqrt(1.0 / precision)
    assert max(thermostats) < 100.0


@pytest.mark.parametrize("method", ["quantile", "mis"])
def test_head_methods_cover_held_out_data(tmp_path, method):
    settings = load_settings(PRESETS / f"{method}.env", environ={})
    settings.update(DATA_STEPS="2000", RUN_OUT=str(tmp_path))
    record = run_experiment(ExperimentConfig.from_settings(settings), ResultsStore(tmp_path))
    assert 0.90 <= record.overall.coverage <= 0.98


@pytest.mark.parametrize("method", ["bootstrap", "sg-mcmc"])
def test_more_samples_lower_mean_interval_score(tmp_path, method):
    settings = load_settings(PRESETS / f"{method}.env", environ={})
    settings.update(SWEEP_OVERRIDES, RUN_OUT=str(tmp_path))
    table = sample_complexity_sweep(ExperimentConfig.from_settings(settings), counts=(5, 25), seeds=range(10))
    means = table.means()
    assert means[25] < means[5]
    assert table.improved_seeds(5, 25) >= 8


class TestIntervalRegression:
    def test_wide_rho_learns_narrower_interval(self, triangle):
        data = TrainingData(persistence_windows(64, 0.5, seed=0), persistence_windows(16, 0.5, seed=1))
        inputs = persistence_windows(20, 0.5, seed=2).inputs
        config = model_config(HeadKind.INTERVAL_3, residual=True)
        train = TrainConfig(epochs=100, patience=100, batch_size=32)
        narrow = mis_forecast(config, data, inputs, 0.9, train, triangle, seed=3)
        wide = mis_forecast(config, data, inputs, 0.05, train, triangle, seed=3)
        assert np.mean(narrow.upper - narrow.lower) < np.mean(wide.upper - wide.lower)

    def test_noiseless_targets_shrink_the_interval(self, triangle):
        data = TrainingData(persistence_windows(64, 0.0, seed=0), persistence_windows(16, 0.0, seed=1))
        inputs = persistence_windows(20, 0.0, seed=2).inputs
        train = TrainConfig(learning_rate=5e-3, epochs=400, patience=400, batch_size=32)
        forecast = mis_forecast(model_config(HeadKind.INTERVAL_3, residual=True), data, inputs, 0.05, train, triangle)
        assert np.mean(forecast.upper - forecast.lower) < 0.05

    def test_constant_inputs_recover_order_statistics(self, triangle):
        data = TrainingData(constant_input_windows(500, seed=0), constant_input_windows(100, seed=1))
        reference = empirical_interval(data.train.targets.ravel(), 0.1)
        train = TrainConfig(epochs=150, patience=150, batch_size=125)
        forecast = mis_forecast(
            model_config(HeadKind.INTERVAL_3), data, np.zeros((5, HISTORY, NODES, 1)), 0.1, train, triangle
        )
        assert np.max(np.abs(forecast.lower - reference.lower)) <= 0.1
        assert np.max(np.abs(forecast.upper - reference.upper)) <= 0.1
