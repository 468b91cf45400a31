"""Recurrent sequence-to-sequence forecaster base."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from stuq.core.enums import CellKind, Gating, HeadKind
from stuq.core.errors import ConfigError, ShapeError, ValidationError
from stuq.diffcore import DiffValue, no_tape, ops
from stuq.diffcore.base import as_value
from stuq.scoring.spline import quantile_from_parts, spline_parts

logger = logging.getLogger(__name__)

HEAD_LABELS = {
    HeadKind.POINT: ("point",),
    HeadKind.QUANTILE_3: ("q_lower", "q_median", "q_upper"),
    HeadKind.INTERVAL_3: ("lower", "point", "upper"),
    HeadKind.SPLINE_11: ("spline",),
}

# Head column fed back to the decoder in free-running mode.
FEEDBACK_COLUMN = {
    HeadKind.POINT: 0,
    HeadKind.QUANTILE_3: 1,
    HeadKind.INTERVAL_3: 1,
}

GATE_BIAS_INIT = 1.0


@dataclass
class ModelConfig:
    """Architecture of a recurrent forecaster.

    ``nodes`` is the location count P. Grid models also need ``grid_shape``
    with W * H = P; graph models need ``support_count`` supports at build time.
    """
    cell_kind: CellKind = CellKind.GRAPH_CONV
    features: int = 1
    nodes: int = 1
    hidden_units: int = 16
    layers: int = 1
    horizon: int = 12
    head_kind: HeadKind = HeadKind.POINT
    gating: Gating = Gating.GRU
    dropout_rate: float = 0.0
    diffusion_steps: int = 2
    support_count: int = 1
    include_self: bool = False
    kernel_size: int = 3
    grid_shape: Optional[tuple[int, int]] = None
    padding: str = "zeros"
    residual: bool = False

    def __post_init__(self):
        try:
            self.cell_kind = CellKind(self.cell_kind)
            self.head_kind = HeadKind(self.head_kind)
            self.gating = Gating(self.gating)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        for name in ("features", "nodes", "hidden_units", "layers", "horizon", "diffusion_steps"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.padding not in ("zeros", "periodic"):
            raise ConfigError(f"padding must be 'zeros' or 'periodic', got {self.padding}")
        if self.cell_kind == CellKind.GRID_CONV:
            if self.kernel_size < 1 or self.kernel_size % 2 == 0:
                raise ConfigError(f"kernel_size must be an odd positive integer, got {self.kernel_size}")
            if self.grid_shape is None:
                raise ConfigError("grid models need grid_shape")
            self.grid_shape = tuple(int(v) for v in self.grid_shape)
            if self.grid_shape[0] * self.grid_shape[1] != self.nodes:
                raise ConfigError(f"grid_shape {self.grid_shape} does not cover {self.nodes} nodes")
        elif self.support_count < 0 or (self.support_count == 0 and not self.include_self):
            raise ConfigError("graph models need at least one support or include_self")

    @property
    def head_width(self) -> int:
        return self.head_kind.width

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("cell_kind", "head_kind", "gating"):
            data[key] = data[key].value
        if data["grid_shape"] is not None:
            data["grid_shape"] = list(data["grid_shape"])
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModelConfig":
        data = dict(data)
        if data.get("grid_shape") is not None:
            data["grid_shape"] = tuple(data["grid_shape"])
        return cls(**data)


@dataclass
class ForecastOutput:
    """Decoded heads, each (batch, H, P, D) or (batch, H, P, D, 11) for splines."""
    head_kind: HeadKind
    heads: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, ...]:
        return HEAD_LABELS[self.head_kind]

    def __getitem__(self, label: str) -> np.ndarray:
        return self.heads[label]


SpatialOp = Callable[[DiffValue, DiffValue], DiffValue]


def recurrent_step(
    state: DiffValue,
    inputs: DiffValue,
    parameters: Mapping[str, DiffValue],
    prefix: str,
    gating: Gating,
    spatial: SpatialOp,
) -> DiffValue:
    """One recurrent update with ``spatial`` standing in for matrix products.

    plain: h' = σ(W^h * h + W^x * x + b)
    gru:   [r, u] = σ(...); c = tanh(W^x * x + W^h * (r ⊙ h) + b); h' = u ⊙ h + (1 - u) ⊙ c
    """
    p = parameters
    if Gating(gating) == Gating.PLAIN:
        pre = spatial(state, p[f"{prefix}.wh"]) + spatial(inputs, p[f"{prefix}.wx"]) + p[f"{prefix}.b"]
        return ops.sigmoid(pre)

    units = state.data.shape[-1]
    gates = ops.sigmoid(
        spatial(inputs, p[f"{prefix}.gate_wx"]) + spatial(state, p[f"{prefix}.gate_wh"]) + p[f"{prefix}.gate_b"]
    )
    reset = gates[..., :units]
    update = gates[..., units:]
    candidate = ops.tanh(
        spatial(inputs, p[f"{prefix}.cand_wx"])
        + spatial(ops.mul(reset, state), p[f"{prefix}.cand_wh"])
        + p[f"{prefix}.cand_b"]
    )
    return ops.mul(update, state) + ops.mul(1.0 - update, candidate)


class RecurrentForecaster(ABC):
    """Encoder-decoder forecaster over frames of shape (batch, P, D)."""

    def __init__(
        self,
        config: ModelConfig,
        parameters: Optional[dict[str, DiffValue]] = None,
        seed: int = 0,
    ):
        self.config = config
        if parameters is None:
            parameters = self.initialize(np.random.default_rng(seed))
        self._check_parameters(parameters)
        self.parameters = parameters

    # --- architecture -------------------------------------------------

    @abstractmethod
    def weight_shape(self, d_in: int, d_out: int) -> tuple[int, ...]:
        """Shape of one spatial weight mapping d_in to d_out channels."""
        pass

    @abstractmethod
    def spatial(self, x: DiffValue, weight: DiffValue) -> DiffValue:
        """Apply the spatial operator to (batch, P, d_in) frames."""
        pass

    def fan_in(self, shape: tuple[int, ...]) -> int:
        return int(np.prod(shape[:-1]))

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        """Parameter shapes, a pure function of the config."""
        cfg = self.config
        units = cfg.hidden_units
        shapes: dict[str, tuple[int, ...]] = {}
        for stack in ("encoder", "decoder"):
            for layer in range(cfg.layers):
                d_in = cfg.features if layer == 0 else units
                prefix = f"{stack}.{layer}"
                if cfg.gating == Gating.PLAIN:
                    shapes[f"{prefix}.wx"] = self.weight_shape(d_in, units)
                    shapes[f"{prefix}.wh"] = self.weight_shape(units, units)
                    shapes[f"{prefix}.b"] = (units,)
                else:
                    shapes[f"{prefix}.gate_wx"] = self.weight_shape(d_in, 2 * units)
                    shapes[f"{prefix}.gate_wh"] = self.weight_shape(units, 2 * units)
                    shapes[f"{prefix}.gate_b"] = (2 * units,)
                    shapes[f"{prefix}.cand_wx"] = self.weight_shape(d_in, units)
                    shapes[f"{prefix}.cand_wh"] = self.weight_shape(units, units)
                    shapes[f"{prefix}.cand_b"] = (units,)
        shapes["head.w"] = (units, cfg.features * cfg.head_width)
        shapes["head.b"] = (cfg.features * cfg.head_width,)
        return shapes

    @property
    def parameter_count(self) -> int:
        return int(sum(np.prod(s) for s in self.parameter_shapes().values()))

    def initialize(self, rng: np.random.Generator) -> dict[str, DiffValue]:
        """Uniform ±1/√fan-in weights; GRU gate biases start at 1, other biases at 0."""
        parameters = {}
        for name, shape in self.parameter_shapes().items():
            if is_bias(name):
                fill = GATE_BIAS_INIT if name.endswith("gate_b") else 0.0
                data = np.full(shape, fill)
            else:
                bound = 1.0 / np.sqrt(self.fan_in(shape))
                data = rng.uniform(-bound, bound, size=shape)
            parameters[name] = ops.parameter(data, name=name)
        return parameters

    def _check_parameters(self, parameters: Mapping[str, DiffValue]) -> None:
        expected = self.parameter_shapes()
        if set(parameters) != set(expected):
            missing = sorted(set(expected) - set(parameters))
            extra = sorted(set(parameters) - set(expected))
            raise ShapeError(f"Parameter names differ: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            if parameters[name].data.shape != shape:
                raise ShapeError(f"Parameter {name} has shape {parameters[name].data.shape}, expected {shape}")

    # --- snapshots ----------------------------------------------------

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: value.data.copy() for name, value in self.parameters.items()}

    def load_snapshot(self, snapshot: Mapping[str, np.ndarray]) -> None:
        for name, value in self.parameters.items():
            if name not in snapshot:
                raise ShapeError(f"Snapshot lacks parameter {name}")
            data = np.asarray(snapshot[name], dtype=np.float64)
            if data.shape != value.data.shape:
                raise ShapeError(f"Snapshot {name} has shape {data.shape}, expected {value.data.shape}")
            value.data = data.copy()

    def with_parameters(self, parameters: dict[str, DiffValue]) -> "RecurrentForecaster":
        """A forecaster sharing this one's architecture with other parameter values."""
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone._check_parameters(parameters)
        clone.parameters = parameters
        return clone

    # --- recurrence ---------------------------------------------------

    def cell(self, state: DiffValue, inputs: DiffValue, prefix: str) -> DiffValue:
        return recurrent_step(state, inputs, self.parameters, prefix, self.config.gating, self.spatial)

    def project(self, hidden: DiffValue, frame: DiffValue) -> DiffValue:
        """Heads for one step: (batch, P, D, width)."""
        cfg = self.config
        batch, nodes = hidden.data.shape[:2]
        out = ops.matmul(hidden, self.parameters["head.w"]) + self.parameters["head.b"]
        out = ops.reshape(out, (batch, nodes, cfg.features, cfg.head_width))
        if cfg.residual:
            mask = np.ones(cfg.head_width)
            if cfg.head_kind == HeadKind.SPLINE_11:
                mask[1:] = 0.0
            anchor = ops.reshape(frame, (batch, nodes, cfg.features, 1))
            out = out + ops.mul(anchor, mask)
        return out

    def feedback(self, heads: DiffValue) -> DiffValue:
        """Frame fed back to the decoder: the median or point head."""
        if self.config.head_kind == HeadKind.SPLINE_11:
            intercept, slopes, knots = spline_parts(heads)
            return quantile_from_parts(intercept, slopes, knots, 0.5)
        return heads[..., FEEDBACK_COLUMN[self.config.head_kind]]

    def forward(
        self,
        history,
        horizon: Optional[int] = None,
        targets: Optional[np.ndarray] = None,
        teacher_forcing: float = 0.0,
        rng: Optional[np.random.Generator] = None,
    ) -> DiffValue:
        """Run encoder and decoder on (batch, T_in, P, D) history.

        Returns heads of shape (batch, H, P, D, width). With ``targets`` the
        decoder input at each step is the ground truth frame with probability
        ``teacher_forcing`` (1 = always); otherwise it is the model's own
        feedback frame. Without targets the decoder runs free.
        """
        cfg = self.config
        horizon = cfg.horizon if horizon is None else horizon
        if horizon != cfg.horizon:
            raise ValidationError(f"Horizon {horizon} does not match the model horizon {cfg.horizon}")
        history = as_value(history)
        if history.data.ndim != 4:
            raise ShapeError(f"History must be (batch, T_in, P, D), got {history.data.shape}")
        batch, steps, nodes, features = history.data.shape
        if steps < 1:
            raise ShapeError("History needs at least one step")
        if (nodes, features) != (cfg.nodes, cfg.features):
            raise ShapeError(f"History frames are {nodes}x{features}, model expects {cfg.nodes}x{cfg.features}")
        if targets is not None:
            targets = np.asarray(targets, dtype=np.float64)
            if targets.shape != (batch, horizon, nodes, features):
                raise ShapeError(f"Targets must be {(batch, horizon, nodes, features)}, got {targets.shape}")
        elif teacher_forcing > 0:
            raise ValidationError("Teacher forcing needs target frames")
        rng = rng or np.random.default_rng(0)

        zeros = np.zeros((batch, nodes, cfg.hidden_units))
        states = [ops.constant(zeros) for _ in range(cfg.layers)]
        for t in range(steps):
            x = history[:, t]
            for layer in range(cfg.layers):
                states[layer] = self.cell(states[layer], x, f"encoder.{layer}")
                x = states[layer]

        frame = history[:, steps - 1]
        outputs = []
        for t in range(horizon):
            x = frame
            for layer in range(cfg.layers):
                states[layer] = self.cell(states[layer], x, f"decoder.{layer}")
                x = states[layer]
            heads = self.project(x, frame)
            outputs.append(heads)
            if t + 1 == horizon:
                break
            if targets is not None and teacher_forcing > 0 and rng.random() < teacher_forcing:
                frame = ops.constant(targets[:, t])
            else:
                frame = self.feedback(heads)
        return ops.stack(outputs, axis=1)

    def forecast(self, history, targets: Optional[np.ndarray] = None) -> ForecastOutput:
        """Inference without recording; teacher-forced when ``targets`` is given."""
        history = np.asarray(as_value(history).data)
        squeeze = history.ndim == 3
        if squeeze:
            history = history[None]
            if targets is not None:
                targets = np.asarray(targets)[None]
        with no_tape():
            out = self.forward(
                history,
                targets=targets,
                teacher_forcing=1.0 if targets is not None else 0.0,
            ).data
        if squeeze:
            out = out[0]
        labels = HEAD_LABELS[self.config.head_kind]
        if self.config.head_kind == HeadKind.SPLINE_11:
            heads = {"spline": out}
        else:
            heads = {label: out[..., i] for i, label in enumerate(labels)}
        return ForecastOutput(self.config.head_kind, heads)


def is_bias(name: str) -> bool:
    return name.endswith(".b") or name.endswith("_b")


def forecast(model: RecurrentForecaster, history, horizon: Optional[int] = None, targets=None) -> ForecastOutput:
    """Free-running forecast, or teacher-forced when ``targets`` is supplied."""
    if horizon is not None and horizon != model.config.horizon:
        raise ValidationError(f"Horizon {horizon} does not match the model horizon {model.config.horizon}")
    return model.forecast(history, targets)
