"""Experiment orchestration: data, method dispatch, evaluation and persistence."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from stuq.config import ExperimentConfig
from stuq.core.errors import ConfigError, DivergenceError, ValidationError
from stuq.core.windows import TrainingData, WindowSet
from stuq.methods.base import MethodContext, ProbabilisticForecast
from stuq.methods.executor import ReplicateExecutor
from stuq.methods.registry import METHODS, MethodRegistry
from stuq.scoring.metrics import METRIC_NAMES, MetricBundle, summary_metrics

from .artifacts import save_checkpoint, write_forecast
from .datasets import Dataset, load_dataset
from .results_store import ResultsRecord, ResultsStore, make_run_id
from .synthetic import make_synthetic

logger = logging.getLogger(__name__)


@dataclass
class PreparedRun:
    """A dataset cut into windows and the method context built from it."""
    dataset: Dataset
    data: TrainingData
    test: WindowSet
    context: MethodContext

    @property
    def truth(self) -> np.ndarray:
        """Test targets in physical units; masked entries are NaN."""
        return np.where(self.test.mask, self.dataset.denormalize(self.test.targets), np.nan)


@dataclass
class Evaluation:
    horizons: list[tuple[int, MetricBundle]]
    windows: list[tuple[int, MetricBundle]]
    overall: MetricBundle


def build_dataset(config: ExperimentConfig) -> Dataset:
    """Load the configured CSV or generate the configured synthetic series."""
    data = config.data
    if data.generator is not None:
        return make_synthetic(data.generator, config.seed, data.schema)
    return load_dataset(data.path, data.schema, data.adjacency, data.grid_shape)


def prepare_run(
    config: ExperimentConfig,
    dataset: Optional[Dataset] = None,
    seed: Optional[int] = None,
) -> PreparedRun:
    dataset = dataset if dataset is not None else build_dataset(config)
    data = dataset.training_data()
    test = dataset.windows("test")
    if len(test) == 0:
        raise ValidationError("Test split has no windows; lengthen the series or shorten the windows")
    logger.info(f"Windows: {len(data.train)} train, {len(data.validation)} validation, {len(test)} test")
    context = MethodContext(
        model_config=config.model_config(dataset.nodes, dataset.features, dataset.grid_shape),
        data=data,
        test_inputs=test.inputs,
        rho=config.rho,
        seed=config.seed if seed is None else seed,
        train=config.train,
        graph=dataset.graph,
        support_kinds=config.model.support_kinds,
        settings=config.method_settings(),
        executor=ReplicateExecutor(config.workers),
    )
    return PreparedRun(dataset, data, test, context)


def evaluate_forecast(
    forecast: ProbabilisticForecast,
    truth: np.ndarray,
    mask: np.ndarray,
    window_steps: Sequence[int] = (),
    clamp_crossing: bool = False,
) -> Evaluation:
    """Metrics per horizon step, over cumulative first-k-step windows and overall.

    ``forecast`` and ``truth`` must already be in physical units.
    """
    def bundle(steps) -> MetricBundle:
        return summary_metrics(
            forecast.mean[:, steps],
            truth[:, steps],
            forecast.rho,
            None if forecast.lower is None else forecast.lower[:, steps],
            None if forecast.upper is None else forecast.upper[:, steps],
            mask[:, steps],
            clamp_crossing,
        )

    horizon = truth.shape[1]
    return Evaluation(
        horizons=[(h + 1, bundle(slice(h, h + 1))) for h in range(horizon)],
        windows=[(k, bundle(slice(0, k))) for k in window_steps],
        overall=bundle(slice(None)),
    )


def average_bundles(bundles: Sequence[MetricBundle]) -> MetricBundle:
    """Field-wise mean; interval fields stay None when the first bundle has none."""
    values = {}
    for name in METRIC_NAMES:
        column = [getattr(b, name) for b in bundles]
        values[name] = None if column[0] is None else float(np.mean(column))
    return MetricBundle(**values, count=bundles[0].count)


def average_evaluations(evaluations: Sequence[Evaluation]) -> Evaluation:
    first = evaluations[0]
    return Evaluation(
        horizons=[(h, average_bundles([e.horizons[i][1] for e in evaluations])) for i, (h, _) in enumerate(first.horizons)],
        windows=[(k, average_bundles([e.windows[i][1] for e in evaluations])) for i, (k, _) in enumerate(first.windows)],
        overall=average_bundles([e.overall for e in evaluations]),
    )


def _check_finite(evaluation: Evaluation) -> None:
    bundles = [b for _, b in evaluation.horizons] + [b for _, b in evaluation.windows] + [evaluation.overall]
    for bundle in bundles:
        for name in METRIC_NAMES:
            value = getattr(bundle, name)
            if value is not None and not np.isfinite(value):
                raise DivergenceError(f"Metric {name} is not finite")


def _json_extras(extras: dict) -> dict:
    kept = {}
    for key, value in extras.items():
        if isinstance(value, (bool, int, float, str)):
            kept[key] = value
        elif isinstance(value, np.generic):
            kept[key] = value.item()
    return kept


def run_experiment(
    config: ExperimentConfig,
    store: Optional[ResultsStore] = None,
    registry: MethodRegistry = METHODS,
    dataset: Optional[Dataset] = None,
    checkpoint: bool = False,
) -> ResultsRecord:
    """Run the configured method and write its record and raw forecast.

    Nothing is written unless the method finishes and every metric is finite.
    """
    started = time.perf_counter()
    method = registry.require(config.method)
    prepared = prepare_run(config, dataset)
    logger.info(f"Running {method.tag.value} with seed {config.seed} at rho = {config.rho}")
    forecast = method.run(prepared.context)

    denormalize = prepared.dataset.denormalize
    physical = forecast.map_values(denormalize)
    truth, mask = prepared.truth, prepared.test.mask
    windows = config.horizon_windows()
    trials = forecast.extras.get("trials") or [forecast]
    evaluation = average_evaluations([
        evaluate_forecast(t.map_values(denormalize), truth, mask, windows, config.clamp_crossing)
        for t in trials
    ])
    _check_finite(evaluation)

    echo = config.to_dict()
    extras = _json_extras(forecast.extras)
    extras["trials"] = len(trials)
    if physical.has_interval:
        extras["crossing"] = physical.crossing
    extras["normalization"] = prepared.dataset.stats.to_dict()
    record = ResultsRecord(
        run_id=make_run_id(config.method.value, config.seed, echo),
        method=config.method.value,
        seed=config.seed,
        rho=config.rho,
        config=echo,
        horizons=evaluation.horizons,
        windows=evaluation.windows,
        overall=evaluation.overall,
        sample_count=physical.sample_count,
        extras=extras,
    )

    store = store or ResultsStore.from_env(config.out_dir)
    run_dir = store.run_dir(record.run_id)
    write_forecast(
        run_dir, physical, truth, mask,
        node_ids=prepared.dataset.node_ids,
        target_times=prepared.dataset.target_times("test"),
    )
    if checkpoint:
        model = forecast.extras.get("model")
        if model is None:
            raise ConfigError(f"Method {config.method.value} does not produce a single model to checkpoint")
        save_checkpoint(run_dir, model, {"normalization": prepared.dataset.stats.to_dict()})
    record.wall_clock_seconds = time.perf_counter() - started
    store.save(record)
    logger.info(
        f"Run {record.run_id}: MAE {record.overall.mae:.4f}"
        + ("" if record.overall.mis is None else f", MIS {record.overall.mis:.4f}, coverage {record.overall.coverage:.3f}")
    )
    return record


def train_point_model(config: ExperimentConfig, store: Optional[ResultsStore] = None) -> ResultsRecord:
    """Train and checkpoint a point forecaster, recording its test metrics."""
    return run_experiment(config.with_overrides(method="point"), store, checkpoint=True)
