"""MIS as a function of the Monte Carlo sample count."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from stuq.config import ExperimentConfig
from stuq.core.enums import MethodTag
from stuq.core.errors import ValidationError
from stuq.methods.base import ProbabilisticForecast
from stuq.methods.registry import METHODS, MethodRegistry
from stuq.scoring.metrics import summary_metrics

from .artifacts import atomic_write_json
from .datasets import Dataset
from .experiment import PreparedRun, build_dataset, prepare_run

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class SweepTable:
    """MIS per (sample count, seed) for one sampling method."""
    method: str
    rho: float
    rows: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def counts(self) -> list[int]:
        return sorted({count for count, _, _ in self.rows})

    @property
    def seeds(self) -> list[int]:
        return sorted({seed for _, seed, _ in self.rows})

    def mis(self, count: int, seed: int) -> float:
        for c, s, value in self.rows:
            if c == count and s == seed:
                return value
        raise ValidationError(f"No sweep entry for S = {count}, seed {seed}")

    def means(self) -> dict[int, float]:
        """Across-seed mean MIS per sample count."""
        return {c: float(np.mean([v for count, _, v in self.rows if count == c])) for c in self.counts}

    def improved_seeds(self, low: int, high: int) -> int:
        """Seeds whose MIS at ``high`` samples is below that at ``low``."""
        return sum(self.mis(high, s) < self.mis(low, s) for s in self.seeds)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "rho": self.rho,
            "rows": [{"samples": c, "seed": s, "mis": v} for c, s, v in self.rows],
            "means": {str(c): v for c, v in self.means().items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepTable":
        return cls(data["method"], data["rho"], [(r["samples"], r["seed"], r["mis"]) for r in data["rows"]])

    def save(self, path: PathLike) -> Path:
        return atomic_write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: PathLike) -> "SweepTable":
        path = Path(path)
        if path.is_dir():
            path = path / "sweep.json"
        if not path.is_file():
            raise ValidationError(f"No sweep table at {path}")
        return cls.from_dict(json.loads(path.read_text()))


def with_sample_budget(config: ExperimentConfig, count: int) -> ExperimentConfig:
    """The config whose method draws at least ``count`` samples, with dropout trials off."""
    if config.method == MethodTag.BOOTSTRAP:
        return dataclasses.replace(config, bootstrap=dataclasses.replace(config.bootstrap, replicates=count))
    if config.method == MethodTag.MC_DROPOUT:
        return dataclasses.replace(config, dropout=dataclasses.replace(config.dropout, passes=count, trials=1))
    if config.method == MethodTag.SG_MCMC:
        chains = math.ceil(count / config.sampler.draws_per_chain)
        return dataclasses.replace(config, sampler=dataclasses.replace(config.sampler, chains=chains))
    raise ValidationError(f"Sample sweeps need a sampling method, got {config.method.value}")


def _check_counts(counts: Sequence[int]) -> tuple[int, ...]:
    counts = tuple(int(c) for c in counts)
    if not counts:
        raise ValidationError("Sweep needs at least one sample count")
    if any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValidationError(f"Sample counts must be strictly ascending, got {counts}")
    if counts[0] < 2:
        raise ValidationError("Sample counts must be at least 2")
    return counts


def _sampled_forecast(
    config: ExperimentConfig,
    count: int,
    seed: int,
    prepared: PreparedRun,
    registry: MethodRegistry,
) -> ProbabilisticForecast:
    budget = with_sample_budget(config, count)
    context = dataclasses.replace(prepared.context, seed=seed, settings=budget.method_settings())
    forecast = registry.require(config.method).run(context)
    return forecast if forecast.sample_count == count else forecast.truncated(count)


def _mis(forecast: ProbabilisticForecast, prepared: PreparedRun) -> float:
    physical = forecast.map_values(prepared.dataset.denormalize)
    metrics = summary_metrics(
        physical.mean, prepared.truth, physical.rho, physical.lower, physical.upper, prepared.test.mask
    )
    return metrics.mis


def sweep_point(
    config: ExperimentConfig,
    count: int,
    seed: int,
    dataset: Optional[Dataset] = None,
    registry: MethodRegistry = METHODS,
) -> float:
    """MIS of a from-scratch run drawing exactly ``count`` samples."""
    prepared = prepare_run(config, dataset)
    return _mis(_sampled_forecast(config, count, seed, prepared, registry), prepared)


def sample_complexity_sweep(
    config: ExperimentConfig,
    counts: Optional[Sequence[int]] = None,
    seeds: Optional[Sequence[int]] = None,
    registry: MethodRegistry = METHODS,
    dataset: Optional[Dataset] = None,
) -> SweepTable:
    """MIS at every sample count for every seed.

    Each seed runs once at the largest count; smaller counts reuse its first
    S samples, which the seed derivation makes identical to a run at S.
    """
    if not config.method.is_sampling:
        raise ValidationError(f"Sample sweeps need a sampling method, got {config.method.value}")
    counts = _check_counts(counts if counts is not None else config.sweep_counts)
    seeds = tuple(seeds if seeds is not None else config.sweep_seeds)
    prepared = prepare_run(config, dataset if dataset is not None else build_dataset(config))

    table = SweepTable(config.method.value, config.rho)
    for seed in seeds:
        full = _sampled_forecast(config, counts[-1], seed, prepared, registry)
        for count in counts:
            table.rows.append((count, seed, _mis(full.truncated(count), prepared)))
        logger.info(f"Sweep seed {seed}: " + ", ".join(f"S={c} MIS {table.mis(c, seed):.4f}" for c in counts))
    for count, mean in table.means().items():
        logger.info(f"Mean MIS over {len(seeds)} seeds at S = {count}: {mean:.4f}")
    return table
