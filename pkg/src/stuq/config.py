"""Configuration for stuq experiments.

Presets are dotenv files whose keys are grouped by section prefix
(``DATA_``, ``MODEL_``, ``TRAIN_``, ``METHOD_``, ``BOOTSTRAP_``,
``DROPOUT_``, ``SAMPLER_``, ``ENSEMBLE_``, ``RUN_``). Environment variables
named ``STUQ_<KEY>`` override the preset; CLI flags override both.
"""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence, Union

from dotenv import dotenv_values

from stuq.core.enums import (
    BootstrapWeighting,
    CellKind,
    Gating,
    GeneratorKind,
    HeadKind,
    MethodTag,
    OptimizerKind,
    PointLoss,
    SupportKind,
)
from stuq.core.errors import ConfigError
from stuq.methods.bootstrap import EnsembleBudget
from stuq.methods.sgnht import SamplerConfig
from stuq.methods.training import TrainConfig
from stuq.models.base import ModelConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "STUQ_"
SECTIONS = ("DATA_", "MODEL_", "TRAIN_", "METHOD_", "BOOTSTRAP_", "DROPOUT_", "SAMPLER_", "ENSEMBLE_", "RUN_")

KNOWN_KEYS = frozenset({
    "DATA_PATH", "DATA_ADJACENCY", "DATA_GRID", "DATA_GENERATOR", "DATA_NODES", "DATA_STEPS",
    "DATA_FEATURES", "DATA_NOISE", "DATA_NOISE_SLOPE", "DATA_DECAY", "DATA_GRID_WIDTH",
    "DATA_GRID_HEIGHT", "DATA_PERIOD", "DATA_AMPLITUDE", "DATA_STATIONS", "DATA_HISTORY",
    "DATA_HORIZON", "DATA_STRIDE", "DATA_SPLIT",
    "MODEL_CELL", "MODEL_HIDDEN", "MODEL_LAYERS", "MODEL_HEAD", "MODEL_GATING",
    "MODEL_DIFFUSION_STEPS", "MODEL_SUPPORTS", "MODEL_INCLUDE_SELF", "MODEL_KERNEL",
    "MODEL_PADDING", "MODEL_RESIDUAL", "MODEL_DROPOUT",
    "TRAIN_OPTIMIZER", "TRAIN_LR", "TRAIN_CLIP", "TRAIN_EPOCHS", "TRAIN_PATIENCE", "TRAIN_BATCH",
    "TRAIN_LOSS", "TRAIN_CURRICULUM", "TRAIN_FEATURE_WEIGHTS", "TRAIN_MAE_WEIGHT",
    "METHOD_TAG", "METHOD_RHO", "METHOD_CLAMP_CROSSING",
    "BOOTSTRAP_REPLICATES", "BOOTSTRAP_KEEP", "BOOTSTRAP_WEIGHTING", "BOOTSTRAP_VARY_SEED",
    "DROPOUT_RATE", "DROPOUT_PASSES", "DROPOUT_TRIALS",
    "SAMPLER_STEP", "SAMPLER_DIFFUSION", "SAMPLER_THERMOSTAT", "SAMPLER_PRIOR_VARIANCE",
    "SAMPLER_INIT_STD", "SAMPLER_BURN_IN", "SAMPLER_THINNING", "SAMPLER_DRAWS", "SAMPLER_CHAINS",
    "SAMPLER_BATCH", "SAMPLER_MAX_EPOCHS",
    "ENSEMBLE_SIZE", "ENSEMBLE_KEEP",
    "RUN_SEED", "RUN_OUT", "RUN_WORKERS", "RUN_SAMPLES", "RUN_SEEDS", "RUN_WINDOWS",
})

# Head layout each method trains; sampling methods always use point heads.
METHOD_HEADS = {
    MethodTag.POINT: HeadKind.POINT,
    MethodTag.BOOTSTRAP: HeadKind.POINT,
    MethodTag.MC_DROPOUT: HeadKind.POINT,
    MethodTag.SG_MCMC: HeadKind.POINT,
    MethodTag.QUANTILE: HeadKind.QUANTILE_3,
    MethodTag.MIS: HeadKind.INTERVAL_3,
    MethodTag.SQ: HeadKind.SPLINE_11,
}


def load_settings(
    path: Optional[Union[str, Path]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> dict[str, str]:
    """Merge a preset file with ``STUQ_``-prefixed environment variables."""
    settings: dict[str, str] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        settings.update({k: v for k, v in dotenv_values(path).items() if v is not None})
        logger.debug(f"Read {len(settings)} settings from {path}")

    environ = os.environ if environ is None else environ
    for key, value in environ.items():
        if key.startswith(ENV_PREFIX) and key[len(ENV_PREFIX):].startswith(SECTIONS):
            settings[key[len(ENV_PREFIX):]] = value

    unknown = sorted(k for k in settings if k not in KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"Unknown setting(s): {', '.join(unknown)}")
    return settings


class SettingsReader:
    """Typed access to raw string settings; bad values raise ConfigError."""

    def __init__(self, values: Mapping[str, str]):
        self.values = {k: v.strip() for k, v in values.items()}

    def has(self, key: str) -> bool:
        return self.values.get(key, "") != ""

    def get(self, key: str, default: Any, cast: Callable[[str], Any]) -> Any:
        if not self.has(key):
            return default
        raw = self.values[key]
        try:
            return cast(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid value for {key}: {raw!r}") from e

    def get_str(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.get(key, default, lambda v: v)

    def get_int(self, key: str, default: Optional[int] = None) -> Optional[int]:
        return self.get(key, default, int)

    def get_float(self, key: str, default: Optional[float] = None) -> Optional[float]:
        return self.get(key, default, float)

    def get_bool(self, key: str, default: bool = False) -> bool:
        def parse(value: str) -> bool:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)

        return self.get(key, default, parse)

    def get_floats(self, key: str, default: Optional[Sequence[float]] = None) -> Optional[tuple[float, ...]]:
        return self.get(key, default, lambda v: tuple(float(p) for p in _split_list(v)))

    def get_ints(self, key: str, default: Optional[Sequence[int]] = None) -> Optional[tuple[int, ...]]:
        return self.get(key, default, parse_int_list)

    def get_enum(self, key: str, kind, default=None):
        return self.get(key, default, kind)


def _split_list(value: str) -> list[str]:
    parts = [p.strip() for p in value.replace(";", ",").split(",")]
    if not parts or any(p == "" for p in parts):
        raise ValueError(value)
    return parts


def parse_int_list(value: str) -> tuple[int, ...]:
    """``"5,25"`` or a range ``"0-9"``."""
    if "-" in value and "," not in value:
        start, end = (int(p) for p in value.split("-", 1))
        if end < start:
            raise ValueError(value)
        return tuple(range(start, end + 1))
    return tuple(int(p) for p in _split_list(value))


@dataclass
class WindowSchema:
    """How a series is cut into (history, horizon) windows and split in time."""
    history_length: int = 12
    horizon: int = 12
    stride: int = 1
    split: tuple[float, float, float] = (0.7, 0.1, 0.2)

    def __post_init__(self):
        self.split = tuple(float(f) for f in self.split)
        if self.history_length < 1 or self.horizon < 1 or self.stride < 1:
            raise ConfigError("history length, horizon and stride must be positive")
        if len(self.split) != 3:
            raise ConfigError(f"split needs three fractions, got {self.split}")
        if any(f <= 0 for f in self.split) or abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError(f"split fractions must be positive and sum to 1, got {self.split}")

    @property
    def span(self) -> int:
        return self.history_length + self.horizon


@dataclass
class GeneratorSpec:
    """Synthetic dataset generator and its parameters.

    ``noise`` is the Gaussian noise scale of every generator; for the
    heteroscedastic scalar it is σ₀ in σ(x) = σ₀(1 + noise_slope·|x|).
    """
    kind: GeneratorKind
    nodes: int = 10
    steps: int = 2000
    features: int = 1
    noise: float = 0.1
    noise_slope: float = 0.0
    decay: float = 1.0
    grid_width: int = 8
    grid_height: int = 8
    period: float = 24.0
    amplitude: float = 1.0
    stations: int = 12

    def __post_init__(self):
        try:
            self.kind = GeneratorKind(self.kind)
        except ValueError as e:
            raise ConfigError(f"Unknown generator: {self.kind}") from e
        if self.nodes < 1 or self.steps < 2 or self.features < 1:
            raise ConfigError("generator needs nodes >= 1, steps >= 2 and features >= 1")
        if self.noise < 0 or self.noise_slope < 0:
            raise ConfigError("noise and noise_slope must be nonnegative")
        if self.grid_width < 1 or self.grid_height < 1 or self.stations < 1:
            raise ConfigError("grid dimensions and station count must be positive")
        if self.period <= 0:
            raise ConfigError(f"period must be positive, got {self.period}")

    def to_dict(self) -> dict:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data


@dataclass
class DataConfig:
    """Either a CSV dataset (``path``) or a synthetic generator."""
    path: Optional[str] = None
    adjacency: Optional[str] = None
    grid_shape: Optional[tuple[int, int]] = None
    generator: Optional[GeneratorSpec] = None
    schema: WindowSchema = field(default_factory=WindowSchema)

    def __post_init__(self):
        if (self.path is None) == (self.generator is None):
            raise ConfigError("Exactly one of DATA_PATH or DATA_GENERATOR is required")

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "adjacency": self.adjacency,
            "grid_shape": None if self.grid_shape is None else list(self.grid_shape),
            "generator": None if self.generator is None else self.generator.to_dict(),
            "schema": asdict(self.schema),
        }


@dataclass
class ModelSettings:
    """Architecture choices that do not depend on the dataset's size."""
    cell_kind: CellKind = CellKind.GRAPH_CONV
    hidden_units: int = 16
    layers: int = 1
    head_kind: Optional[HeadKind] = None
    gating: Gating = Gating.GRU
    diffusion_steps: int = 2
    support_kinds: tuple[SupportKind, ...] = (SupportKind.RANDOM_WALK,)
    include_self: bool = False
    kernel_size: int = 3
    padding: str = "zeros"
    residual: bool = False
    dropout_rate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "cell_kind": self.cell_kind.value,
            "hidden_units": self.hidden_units,
            "layers": self.layers,
            "head_kind": None if self.head_kind is None else self.head_kind.value,
            "gating": self.gating.value,
            "diffusion_steps": self.diffusion_steps,
            "support_kinds": [k.value for k in self.support_kinds],
            "include_self": self.include_self,
            "kernel_size": self.kernel_size,
            "padding": self.padding,
            "residual": self.residual,
            "dropout_rate": self.dropout_rate,
        }


@dataclass
class DropoutSettings:
    rate: float = 0.05
    passes: int = 50
    trials: int = 1

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ConfigError(f"DROPOUT_RATE must lie in [0, 1), got {self.rate}")
        if self.passes < 2 or self.trials < 1:
            raise ConfigError("DROPOUT_PASSES must be >= 2 and DROPOUT_TRIALS >= 1")


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs."""
    data: DataConfig
    model: ModelSettings = field(default_factory=ModelSettings)
    train: TrainConfig = field(default_factory=TrainConfig)
    method: MethodTag = MethodTag.POINT
    rho: float = 0.05
    clamp_crossing: bool = False
    bootstrap: EnsembleBudget = field(default_factory=EnsembleBudget)
    dropout: DropoutSettings = field(default_factory=DropoutSettings)
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    ensemble_size: int = 1
    ensemble_keep: float = 1.0
    seed: int = 0
    out_dir: str = "results"
    workers: int = 1
    sweep_counts: tuple[int, ...] = (5, 25)
    sweep_seeds: tuple[int, ...] = tuple(range(10))
    window_steps: tuple[int, ...] = ()

    def __post_init__(self):
        try:
            self.method = MethodTag(self.method)
        except ValueError as e:
            raise ConfigError(f"Unknown method: {self.method}") from e
        if not 0.0 < self.rho < 1.0:
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if self.workers < 1:
            raise ConfigError(f"RUN_WORKERS must be >= 1, got {self.workers}")
        if self.ensemble_size < 1:
            raise ConfigError(f"ENSEMBLE_SIZE must be >= 1, got {self.ensemble_size}")
        if not 0.0 < self.ensemble_keep <= 1.0:
            raise ConfigError(f"ENSEMBLE_KEEP must lie in (0, 1], got {self.ensemble_keep}")
        if any(w < 1 or w > self.data.schema.horizon for w in self.window_steps):
            raise ConfigError(f"RUN_WINDOWS entries must lie in [1, {self.data.schema.horizon}]")
        if not self.sweep_seeds:
            raise ConfigError("RUN_SEEDS must name at least one seed")
        expected = METHOD_HEADS[self.method]
        if self.model.head_kind is not None and self.model.head_kind != expected:
            raise ConfigError(
                f"Method {self.method.value} trains {expected.value} heads, config asks for {self.model.head_kind.value}"
            )

    @classmethod
    def from_env(
        cls,
        path: Optional[Union[str, Path]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "ExperimentConfig":
        """Create configuration from a preset file and ``STUQ_*`` environment variables."""
        return cls.from_settings(load_settings(path, environ))

    @classmethod
    def from_settings(cls, values: Mapping[str, str]) -> "ExperimentConfig":
        s = SettingsReader(values)
        schema = WindowSchema(
            history_length=s.get_int("DATA_HISTORY", 12),
            horizon=s.get_int("DATA_HORIZON", 12),
            stride=s.get_int("DATA_STRIDE", 1),
            split=s.get_floats("DATA_SPLIT", (0.7, 0.1, 0.2)),
        )
        generator = None
        if s.has("DATA_GENERATOR"):
            generator = GeneratorSpec(
                kind=s.get_str("DATA_GENERATOR"),
                nodes=s.get_int("DATA_NODES", 10),
                steps=s.get_int("DATA_STEPS", 2000),
                features=s.get_int("DATA_FEATURES", 1),
                noise=s.get_float("DATA_NOISE", 0.1),
                noise_slope=s.get_float("DATA_NOISE_SLOPE", 0.0),
                decay=s.get_float("DATA_DECAY", 1.0),
                grid_width=s.get_int("DATA_GRID_WIDTH", 8),
                grid_height=s.get_int("DATA_GRID_HEIGHT", 8),
                period=s.get_float("DATA_PERIOD", 24.0),
                amplitude=s.get_float("DATA_AMPLITUDE", 1.0),
                stations=s.get_int("DATA_STATIONS", 12),
            )
        grid = s.get_ints("DATA_GRID")
        if grid is not None and len(grid) != 2:
            raise ConfigError(f"DATA_GRID needs width,height, got {grid}")
        data = DataConfig(
            path=s.get_str("DATA_PATH"),
            adjacency=s.get_str("DATA_ADJACENCY"),
            grid_shape=grid,
            generator=generator,
            schema=schema,
        )

        supports = s.get(
            "MODEL_SUPPORTS", (SupportKind.RANDOM_WALK,),
            lambda v: tuple(SupportKind(p) for p in _split_list(v)) if v.lower() != "none" else (),
        )
        model = ModelSettings(
            cell_kind=s.get_enum("MODEL_CELL", CellKind, CellKind.GRAPH_CONV),
            hidden_units=s.get_int("MODEL_HIDDEN", 16),
            layers=s.get_int("MODEL_LAYERS", 1),
            head_kind=s.get_enum("MODEL_HEAD", HeadKind),
            gating=s.get_enum("MODEL_GATING", Gating, Gating.GRU),
            diffusion_steps=s.get_int("MODEL_DIFFUSION_STEPS", 2),
            support_kinds=supports,
            include_self=s.get_bool("MODEL_INCLUDE_SELF"),
            kernel_size=s.get_int("MODEL_KERNEL", 3),
            padding=s.get_str("MODEL_PADDING", "zeros"),
            residual=s.get_bool("MODEL_RESIDUAL"),
            dropout_rate=s.get_float("MODEL_DROPOUT", 0.0),
        )
        train = TrainConfig(
            optimizer=s.get_enum("TRAIN_OPTIMIZER", OptimizerKind, OptimizerKind.ADAM),
            learning_rate=s.get_float("TRAIN_LR", 1e-2),
            clip_norm=None if s.get_str("TRAIN_CLIP", "").lower() == "none" else s.get_float("TRAIN_CLIP", 5.0),
            epochs=s.get_int("TRAIN_EPOCHS", 50),
            patience=s.get_int("TRAIN_PATIENCE", 10),
            batch_size=s.get_int("TRAIN_BATCH", 64),
            loss=s.get_enum("TRAIN_LOSS", PointLoss, PointLoss.MAE),
            curriculum_epochs=s.get_int("TRAIN_CURRICULUM", 0),
            feature_weights=s.get_floats("TRAIN_FEATURE_WEIGHTS"),
            mae_weight=s.get_float("TRAIN_MAE_WEIGHT", 1.0),
        )
        bootstrap = EnsembleBudget(
            replicates=s.get_int("BOOTSTRAP_REPLICATES", 25),
            keep_fraction=s.get_float("BOOTSTRAP_KEEP", 0.5),
            weighting=s.get_enum("BOOTSTRAP_WEIGHTING", BootstrapWeighting, BootstrapWeighting.SUBSAMPLE),
            vary_seed=s.get_bool("BOOTSTRAP_VARY_SEED", True),
        )
        dropout = DropoutSettings(
            rate=s.get_float("DROPOUT_RATE", 0.05),
            passes=s.get_int("DROPOUT_PASSES", 50),
            trials=s.get_int("DROPOUT_TRIALS", 1),
        )
        sampler = SamplerConfig(
            step_size=s.get_float("SAMPLER_STEP", 5e-4),
            diffusion=s.get_float("SAMPLER_DIFFUSION", 1.0),
            thermostat_init=s.get_float("SAMPLER_THERMOSTAT"),
            prior_variance=s.get_float("SAMPLER_PRIOR_VARIANCE", 4.0),
            init_std=s.get_float("SAMPLER_INIT_STD", 0.2),
            burn_in=s.get_int("SAMPLER_BURN_IN", 500),
            thinning=s.get_int("SAMPLER_THINNING", 1),
            draws_per_chain=s.get_int("SAMPLER_DRAWS", 1),
            chains=s.get_int("SAMPLER_CHAINS", 25),
            batch_size=s.get_int("SAMPLER_BATCH", 64),
            max_epochs=s.get_int("SAMPLER_MAX_EPOCHS"),
        )
        try:
            config = cls(
                data=data,
                model=model,
                train=train,
                method=s.get_str("METHOD_TAG", MethodTag.POINT.value),
                rho=s.get_float("METHOD_RHO", 0.05),
                clamp_crossing=s.get_bool("METHOD_CLAMP_CROSSING"),
                bootstrap=bootstrap,
                dropout=dropout,
                sampler=sampler,
                ensemble_size=s.get_int("ENSEMBLE_SIZE", 1),
                ensemble_keep=s.get_float("ENSEMBLE_KEEP", 1.0),
                seed=s.get_int("RUN_SEED", 0),
                out_dir=s.get_str("RUN_OUT", "results"),
                workers=s.get_int("RUN_WORKERS", 1),
                sweep_counts=s.get_ints("RUN_SAMPLES", (5, 25)),
                sweep_seeds=s.get_ints("RUN_SEEDS", tuple(range(10))),
                window_steps=s.get_ints("RUN_WINDOWS", ()),
            )
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(str(e)) from e
        logger.debug(f"Configuration for method {config.method.value} built from {len(values)} settings")
        return config

    def with_overrides(
        self,
        seed: Optional[int] = None,
        method: Optional[Union[str, MethodTag]] = None,
        rho: Optional[float] = None,
        out_dir: Optional[str] = None,
        sweep_counts: Optional[Sequence[int]] = None,
    ) -> "ExperimentConfig":
        """Apply CLI flags on top of the file and environment settings."""
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if method is not None:
            try:
                method = MethodTag(method)
            except ValueError as e:
                raise ConfigError(f"Unknown method: {method}") from e
            changes["method"] = method
            # A preset's explicit head only fits its own method.
            if self.model.head_kind is not None and METHOD_HEADS[method] != self.model.head_kind:
                changes["model"] = dataclasses.replace(self.model, head_kind=None)
        if rho is not None:
            changes["rho"] = float(rho)
        if out_dir is not None:
            changes["out_dir"] = str(out_dir)
        if sweep_counts is not None:
            changes["sweep_counts"] = tuple(int(c) for c in sweep_counts)
        return dataclasses.replace(self, **changes) if changes else self

    @property
    def head_kind(self) -> HeadKind:
        return METHOD_HEADS[self.method]

    def horizon_windows(self) -> tuple[int, ...]:
        """Cumulative step windows for aggregate metrics (first k steps)."""
        horizon = self.data.schema.horizon
        if self.window_steps:
            return tuple(sorted(set(self.window_steps)))
        return tuple(sorted({max(1, horizon // 4), max(1, horizon // 2), horizon}))

    def model_config(self, nodes: int, features: int, grid_shape: Optional[tuple[int, int]] = None) -> ModelConfig:
        """Concrete architecture for a dataset with ``nodes`` locations and ``features`` channels."""
        return ModelConfig(
            cell_kind=self.model.cell_kind,
            features=features,
            nodes=nodes,
            hidden_units=self.model.hidden_units,
            layers=self.model.layers,
            horizon=self.data.schema.horizon,
            head_kind=self.head_kind,
            gating=self.model.gating,
            dropout_rate=self.model.dropout_rate,
            diffusion_steps=self.model.diffusion_steps,
            support_count=len(self.model.support_kinds),
            include_self=self.model.include_self,
            kernel_size=self.model.kernel_size,
            grid_shape=grid_shape,
            padding=self.model.padding,
            residual=self.model.residual,
        )

    def method_settings(self) -> dict[str, Any]:
        """Per-method hyperparameters keyed the way the methods read them."""
        return {
            "replicates": self.bootstrap.replicates,
            "keep_fraction": self.bootstrap.keep_fraction,
            "weighting": self.bootstrap.weighting,
            "vary_seed": self.bootstrap.vary_seed,
            "rate": self.dropout.rate,
            "passes": self.dropout.passes,
            "trials": self.dropout.trials,
            "sampler": self.sampler,
            "ensemble_size": self.ensemble_size,
            "ensemble_keep": self.ensemble_keep,
        }

    def to_dict(self) -> dict:
        """JSON-ready echo of the configuration."""
        train = asdict(self.train)
        train["optimizer"] = self.train.optimizer.value
        train["loss"] = self.train.loss.value
        train["feature_weights"] = None if self.train.feature_weights is None else list(self.train.feature_weights)
        bootstrap = asdict(self.bootstrap)
        bootstrap["weighting"] = self.bootstrap.weighting.value
        bootstrap.pop("base_seed")
        return {
            "data": self.data.to_dict(),
            "model": self.model.to_dict(),
            "train": train,
            "method": self.method.value,
            "rho": self.rho,
            "clamp_crossing": self.clamp_crossing,
            "bootstrap": bootstrap,
            "dropout": asdict(self.dropout),
            "sampler": asdict(self.sampler),
            "ensemble_size": self.ensemble_size,
            "ensemble_keep": self.ensemble_keep,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "workers": self.workers,
            "sweep_counts": list(self.sweep_counts),
            "sweep_seeds": list(self.sweep_seeds),
            "window_steps": list(self.horizon_windows()),
        }
