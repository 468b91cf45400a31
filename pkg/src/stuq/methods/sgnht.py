"""Stochastic-gradient Nosé-Hoover thermostat posterior sampling."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from stuq.core.enums import HeadKind, MethodTag, SupportKind
from stuq.core.errors import ConfigError, DivergenceError
from stuq.core.windows import TrainingData
from stuq.diffcore import DiffValue, backward, ops, record
from stuq.models.base import ModelConfig, RecurrentForecaster
from stuq.models.factory import ModelFactory
from stuq.spatial.graph import SpatialGraph

from .base import MethodContext, ProbabilisticForecast, UQMethod
from .executor import ReplicateExecutor
from .seeds import derive_rng
from .training import loss_weights

logger = logging.getLogger(__name__)

Gradient = Callable[[np.ndarray], np.ndarray]


@dataclass
class SamplerConfig:
    """SGNHT settings. ``thermostat_init`` defaults to the diffusion A.

    ``max_epochs`` caps the sampling length in passes over the training
    windows; when the cap binds, burn-in is shortened.
    """
    step_size: float = 5e-4
    diffusion: float = 1.0
    thermostat_init: Optional[float] = None
    prior_variance: float = 4.0
    init_std: float = 0.2
    burn_in: int = 500
    thinning: int = 1
    draws_per_chain: int = 1
    chains: int = 25
    batch_size: int = 64
    max_epochs: Optional[int] = None

    def __post_init__(self):
        if self.step_size <= 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if self.diffusion < 0:
            raise ConfigError(f"diffusion must be nonnegative, got {self.diffusion}")
        if self.prior_variance <= 0:
            raise ConfigError(f"prior_variance must be positive, got {self.prior_variance}")
        if self.init_std <= 0:
            raise ConfigError(f"init_std must be positive, got {self.init_std}")
        if self.chains < 1:
            raise ConfigError(f"chains must be >= 1, got {self.chains}")
        if self.burn_in < 0 or self.thinning < 1 or self.draws_per_chain < 1:
            raise ConfigError("burn_in must be >= 0, thinning and draws_per_chain >= 1")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs is not None and self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.thermostat_init is None:
            self.thermostat_init = self.diffusion

    @property
    def total_steps(self) -> int:
        return self.burn_in + self.thinning * self.draws_per_chain


@dataclass
class SGNHTState:
    """Position θ, momentum p and scalar thermostat ξ."""
    position: np.ndarray
    momentum: np.ndarray
    thermostat: float


@dataclass
class ChainResult:
    draws: np.ndarray
    max_abs_thermostat: float
    final: SGNHTState


def sgnht_step(
    state: SGNHTState,
    gradient: Gradient,
    step_size: float,
    diffusion: float,
    rng: np.random.Generator,
) -> SGNHTState:
    """θ += p h; p += -∇L̃(θ) h - ξ p h + N(0, 2A h); ξ += (pᵀp / d - 1) h."""
    h = step_size
    position = state.position + state.momentum * h
    grad = gradient(position)
    noise = rng.standard_normal(position.shape) * math.sqrt(2.0 * diffusion * h)
    momentum = state.momentum - grad * h - state.thermostat * state.momentum * h + noise
    thermostat = state.thermostat + (float(momentum @ momentum) / momentum.size - 1.0) * h
    return SGNHTState(position, momentum, thermostat)


def run_chain(
    gradient: Gradient,
    initial: np.ndarray,
    config: SamplerConfig,
    rng: np.random.Generator,
    momentum: Optional[np.ndarray] = None,
) -> ChainResult:
    """Iterate one chain; keep every ``thinning``-th position after burn-in."""
    initial = np.asarray(initial, dtype=np.float64)
    if momentum is None:
        momentum = rng.standard_normal(initial.shape)
    state = SGNHTState(initial.copy(), np.asarray(momentum, dtype=np.float64), float(config.thermostat_init))
    draws = []
    max_abs = abs(state.thermostat)
    for k in range(1, config.total_steps + 1):
        state = sgnht_step(state, gradient, config.step_size, config.diffusion, rng)
        if not (np.all(np.isfinite(state.position)) and np.all(np.isfinite(state.momentum))
                and math.isfinite(state.thermostat)):
            raise DivergenceError("Sampler state became non-finite", step=k)
        max_abs = max(max_abs, abs(state.thermostat))
        if k > config.burn_in and (k - config.burn_in) % config.thinning == 0:
            draws.append(state.position.copy())
    return ChainResult(np.array(draws), max_abs, state)


class ParameterVector:
    """Flattens a forecaster's named parameters into one vector and back."""

    def __init__(self, model: RecurrentForecaster):
        self.names = sorted(model.parameters)
        self.shapes = [model.parameters[n].data.shape for n in self.names]
        self.sizes = [int(np.prod(s)) for s in self.shapes]
        self.size = int(sum(self.sizes))

    def unflatten(self, vector: np.ndarray) -> dict[str, np.ndarray]:
        out, start = {}, 0
        for name, shape, size in zip(self.names, self.shapes, self.sizes):
            out[name] = vector[start:start + size].reshape(shape)
            start += size
        return out

    def flatten(self, arrays) -> np.ndarray:
        return np.concatenate([np.asarray(arrays[n]).reshape(-1) for n in self.names])


def posterior_gradient(
    model: RecurrentForecaster,
    layout: ParameterVector,
    data: TrainingData,
    config: SamplerConfig,
    rng: np.random.Generator,
) -> Gradient:
    """∇ of N_train · (mean window NLL over a minibatch) + ½‖θ‖² / prior variance.

    The likelihood is a unit-variance Gaussian around the point forecast.
    """
    train = data.train
    count = len(train)

    def gradient(theta: np.ndarray) -> np.ndarray:
        model.load_snapshot(layout.unflatten(theta))
        if config.batch_size >= count:
            batch = train
        else:
            batch = train.subset(np.sort(rng.choice(count, size=config.batch_size, replace=False)))
        weights = loss_weights(batch)

        def program() -> DiffValue:
            heads = model.forward(batch.inputs)
            residual = ops.sub(batch.targets, heads[..., 0])
            nll = ops.sum(ops.mul(ops.square(residual), 0.5 * weights)) / float(len(batch))
            return ops.mul(nll, float(count))

        tape = record(program)
        grads = backward(tape, tape.output, model.parameters)
        return layout.flatten(grads) + theta / config.prior_variance

    return gradient


def sgnht_sample(
    model_config: ModelConfig,
    data: TrainingData,
    sampler: SamplerConfig,
    test_inputs: np.ndarray,
    rho: float,
    seed: int = 0,
    graph: Optional[SpatialGraph] = None,
    support_kinds: Sequence[SupportKind] = (SupportKind.RANDOM_WALK,),
    executor: Optional[ReplicateExecutor] = None,
) -> ProbabilisticForecast:
    """Posterior predictive samples from parallel chains, chain-major order."""
    model_config = dataclasses.replace(model_config, head_kind=HeadKind.POINT)
    executor = executor or ReplicateExecutor()
    template = ModelFactory.create(model_config, graph, support_kinds, seed=seed)
    layout = ParameterVector(template)

    if sampler.max_epochs is not None:
        per_epoch = math.ceil(len(data.train) / min(sampler.batch_size, len(data.train)))
        cap = sampler.max_epochs * per_epoch
        if sampler.total_steps > cap:
            burn_in = max(0, cap - sampler.thinning * sampler.draws_per_chain)
            logger.warning(f"Sampling capped at {sampler.max_epochs} epochs; burn-in shortened to {burn_in}")
            sampler = dataclasses.replace(sampler, burn_in=burn_in)

    def chain(c: int) -> tuple[np.ndarray, float]:
        rng = derive_rng(seed, "chain", c)
        model = template.with_parameters(
            {n: ops.parameter(v, name=n) for n, v in template.snapshot().items()}
        )
        initial = rng.normal(0.0, sampler.init_std, size=layout.size)
        result = run_chain(posterior_gradient(model, layout, data, sampler, rng), initial, sampler, rng)
        predictions = []
        for draw in result.draws:
            model.load_snapshot(layout.unflatten(draw))
            predictions.append(model.forecast(test_inputs)["point"])
        logger.debug(f"Chain {c} done, max |xi| = {result.max_abs_thermostat:.3f}")
        return np.stack(predictions), result.max_abs_thermostat

    results = executor.map(chain, range(sampler.chains), label="chain")
    samples = np.concatenate([r[0] for r in results], axis=0)
    max_xi = max(r[1] for r in results)
    logger.info(f"SGNHT collected {samples.shape[0]} draws from {sampler.chains} chains")
    return ProbabilisticForecast.from_samples(MethodTag.SG_MCMC, samples, rho, max_abs_thermostat=max_xi)


class SGNHTMethod(UQMethod):
    """Bayesian posterior sampling over the forecaster's weights."""

    @property
    def tag(self) -> MethodTag:
        return MethodTag.SG_MCMC

    def run(self, context: MethodContext) -> ProbabilisticForecast:
        sampler = context.setting("sampler") or SamplerConfig()
        return sgnht_sample(
            context.model_config, context.data, sampler, context.test_inputs, context.rho,
            context.seed, context.graph, context.support_kinds, context.executor,
        )
