"""Gradient training loop with scheduled sampling and early stopping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, OptimizerKind, PointLoss
from stuq.core.errors import ConfigError, DivergenceError
from stuq.core.windows import TrainingData, WindowSet
from stuq.diffcore import DiffValue, OptimizerState, backward, no_tape, record, step
from stuq.models.base import RecurrentForecaster
from stuq.scoring.losses import crps_loss, mae_loss, mis_training_loss, mse_loss, quantile_loss

logger = logging.getLogger(__name__)

Objective = Callable[[DiffValue, np.ndarray, np.ndarray], DiffValue]


@dataclass
class TrainConfig:
    """Optimization settings shared by every gradient-trained method."""
    optimizer: OptimizerKind = OptimizerKind.ADAM
    learning_rate: float = 1e-2
    clip_norm: Optional[float] = 5.0
    epochs: int = 50
    patience: int = 10
    batch_size: int = 64
    loss: PointLoss = PointLoss.MAE
    curriculum_epochs: int = 0
    feature_weights: Optional[tuple[float, ...]] = None
    mae_weight: float = 1.0

    def __post_init__(self):
        try:
            self.optimizer = OptimizerKind(self.optimizer)
            self.loss = PointLoss(self.loss)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.patience < 0:
            raise ConfigError(f"patience must be >= 0, got {self.patience}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.curriculum_epochs < 0:
            raise ConfigError(f"curriculum_epochs must be >= 0, got {self.curriculum_epochs}")
        if self.feature_weights is not None:
            self.feature_weights = tuple(float(w) for w in self.feature_weights)
            if any(w < 0 for w in self.feature_weights):
                raise ConfigError("feature weights must be nonnegative")

    def teacher_forcing(self, epoch: int) -> float:
        """Probability of feeding ground truth to the decoder during ``epoch`` (0-based)."""
        if self.curriculum_epochs == 0:
            return 0.0
        return max(0.0, 1.0 - epoch / self.curriculum_epochs)

    def optimizer_state(self) -> OptimizerState:
        return OptimizerState(kind=self.optimizer, learning_rate=self.learning_rate, clip_norm=self.clip_norm)


@dataclass
class TrainResult:
    """Outcome of one training run; the model holds the best-validation snapshot."""
    model: RecurrentForecaster
    best_epoch: int
    epochs_run: int
    best_loss: float
    history: list[tuple[float, float]] = field(default_factory=list)


def objective_for(head_kind: HeadKind, config: TrainConfig, rho: float = 0.05) -> Objective:
    """Training loss matching a head layout."""
    head_kind = HeadKind(head_kind)
    if head_kind == HeadKind.POINT:
        point = mae_loss if config.loss == PointLoss.MAE else mse_loss
        return lambda heads, y, w: point(y, heads[..., 0], w)
    if head_kind == HeadKind.QUANTILE_3:
        levels = (rho / 2.0, 0.5, 1.0 - rho / 2.0)
        return lambda heads, y, w: quantile_loss(y, heads, levels, w)
    if head_kind == HeadKind.INTERVAL_3:
        return lambda heads, y, w: mis_training_loss(
            y, heads[..., 2], heads[..., 0], heads[..., 1], rho, config.mae_weight, w
        )
    return lambda heads, y, w: crps_loss(y, heads, w)


def loss_weights(windows: WindowSet, feature_weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """Mask times per-feature weights times per-window weights, shaped like the targets."""
    weights = windows.mask.astype(np.float64)
    if feature_weights is not None:
        if len(feature_weights) != windows.features:
            raise ConfigError(f"{len(feature_weights)} feature weights for {windows.features} features")
        weights = weights * np.asarray(feature_weights, dtype=np.float64)
    if windows.window_weights is not None:
        weights = weights * windows.window_weights[:, None, None, None]
    return weights


def evaluate_loss(
    model: RecurrentForecaster,
    windows: WindowSet,
    objective: Objective,
    config: TrainConfig,
    batch_size: Optional[int] = None,
) -> float:
    """Free-running loss, weighted by valid target count across batches."""
    batch_size = batch_size or config.batch_size
    total = weight_sum = 0.0
    with no_tape():
        for start in range(0, len(windows), batch_size):
            part = windows.subset(np.arange(start, min(start + batch_size, len(windows))))
            weights = loss_weights(part, config.feature_weights)
            if weights.sum() == 0:
                continue
            heads = model.forward(part.inputs)
            total += objective(heads, part.targets, weights).item() * weights.sum()
            weight_sum += weights.sum()
    return total / weight_sum if weight_sum > 0 else float("nan")


def train_model(
    model: RecurrentForecaster,
    data: TrainingData,
    objective: Objective,
    config: TrainConfig,
    seed: int = 0,
) -> TrainResult:
    """Minibatch training with early stopping on validation loss.

    Stops once ``patience`` epochs pass without improvement (patience 0 runs
    exactly one epoch) and restores the best snapshot.
    """
    rng = np.random.default_rng(seed)
    state = config.optimizer_state()
    monitor = data.validation if len(data.validation) > 0 else data.train
    if monitor is data.train:
        logger.warning("Validation split is empty; early stopping monitors training loss")

    best_loss = np.inf
    best_epoch = 0
    best_snapshot = model.snapshot()
    history: list[tuple[float, float]] = []
    epochs_since = 0
    epoch = 0
    for epoch in range(1, config.epochs + 1):
        teacher = config.teacher_forcing(epoch - 1)
        order = rng.permutation(len(data.train))
        losses = []
        for start in range(0, len(order), config.batch_size):
            batch = data.train.subset(order[start:start + config.batch_size])
            weights = loss_weights(batch, config.feature_weights)
            if weights.sum() == 0:
                continue

            def program() -> DiffValue:
                heads = model.forward(batch.inputs, targets=batch.targets, teacher_forcing=teacher, rng=rng)
                return objective(heads, batch.targets, weights)

            try:
                tape = record(program)
                gradients = backward(tape, tape.output, model.parameters)
            except DivergenceError as e:
                raise DivergenceError("Training diverged", epoch=epoch, primitive=getattr(e, "primitive", None)) from e
            loss = tape.output.item()
            if not np.isfinite(loss):
                raise DivergenceError("Non-finite training loss", epoch=epoch)
            step(state, model.parameters, gradients)
            losses.append(loss)

        try:
            monitored = evaluate_loss(model, monitor, objective, config)
        except DivergenceError as e:
            raise DivergenceError("Validation diverged", epoch=epoch, primitive=getattr(e, "primitive", None)) from e
        if not np.isfinite(monitored):
            raise DivergenceError("Non-finite validation loss", epoch=epoch)
        train_loss = float(np.mean(losses)) if losses else float("nan")
        history.append((train_loss, monitored))
        logger.debug(f"Epoch {epoch}: train {train_loss:.6f}, validation {monitored:.6f}")

        if monitored < best_loss:
            best_loss = monitored
            best_epoch = epoch
            best_snapshot = model.snapshot()
            epochs_since = 0
        else:
            epochs_since += 1
        if epochs_since >= config.patience:
            logger.info(f"Early stopping after epoch {epoch} (best epoch {best_epoch})")
            break

    model.load_snapshot(best_snapshot)
    return TrainResult(model, best_epoch, epoch, float(best_loss), history)
