"""Self-checks against brute-force and numerical references.

Three suites: the order-statistic interval against the exhaustive interval
score minimizer, the closed-form spline CRPS against adaptive quadrature,
and recorded gradients against central finite differences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from stuq.core.enums import CellKind, HeadKind
from stuq.core.errors import ConfigError
from stuq.diffcore import DiffValue, finite_difference_check, no_tape, ops
from stuq.methods.seeds import derive_rng
from stuq.methods.training import TrainConfig, objective_for
from stuq.models.base import ModelConfig
from stuq.models.factory import ModelFactory
from stuq.scoring.intervals import brute_force_mis_minimizer, empirical_interval
from stuq.scoring.spline import SPLINE_PIECES, SPLINE_WIDTH, crossing_level, crps_pwl, spline_parts
from stuq.spatial.graph import SpatialGraph

logger = logging.getLogger(__name__)

SAMPLE_SIZES = (5, 25, 100)
RHOS = (0.05, 0.2, 0.5)
FAMILIES = ("normal", "exponential", "discrete")

CRPS_TOLERANCE = 1e-6
UNIFORM_TOLERANCE = 1e-9
GRADIENT_TOLERANCE = 1e-4
GRADIENT_STEP = 1e-5


@dataclass
class OracleReport:
    """Outcome of one oracle suite."""
    name: str
    passed: bool
    cases: int
    worst: float = 0.0
    detail: list[str] = field(default_factory=list)


def _draw(rng: np.random.Generator, family: str, count: int) -> np.ndarray:
    if family == "normal":
        return rng.normal(size=count)
    if family == "exponential":
        return rng.exponential(size=count)
    return rng.integers(0, 5, size=count).astype(np.float64)


def interval_oracle(trials: int = 200, seed: int = 0) -> OracleReport:
    """Exhaustive MIS minimizer and order-statistic interval must agree exactly."""
    rng = derive_rng(seed, "oracle-interval")
    combos = [(n, rho, fam) for n in SAMPLE_SIZES for rho in RHOS for fam in FAMILIES]
    failures = []
    for trial in range(trials):
        count, rho, family = combos[trial % len(combos)]
        samples = _draw(rng, family, count)
        closed = empirical_interval(samples, rho)
        brute = brute_force_mis_minimizer(samples, rho)
        if (closed.lower, closed.upper) != (brute.lower, brute.upper):
            failures.append(
                f"N={count} rho={rho} {family}: order statistics ({closed.lower}, {closed.upper}), "
                f"minimizer ({brute.lower}, {brute.upper})"
            )
    return OracleReport("interval", not failures, trials, float(len(failures)), failures)


def _quantile(intercept: float, slopes: np.ndarray, knots: np.ndarray, alpha: float) -> float:
    return float(intercept + np.sum(slopes * np.maximum(0.0, alpha - knots)))


def quadrature_crps(params: np.ndarray, y: float) -> float:
    """∫₀¹ 2(1{y < Q(α)} - α)(Q(α) - y) dα by adaptive quadrature."""
    with no_tape():
        intercept, slopes, knots = (part.numpy() for part in spline_parts(params))
    intercept = float(intercept)
    alpha_star = float(crossing_level(np.asarray(intercept), slopes, knots, np.asarray(y)))

    def integrand(alpha: float) -> float:
        q = _quantile(intercept, slopes, knots, alpha)
        return 2.0 * (float(y < q) - alpha) * (q - y)

    breaks = sorted({*knots.tolist(), alpha_star} - {0.0, 1.0})
    value, _ = quad(integrand, 0.0, 1.0, points=breaks, limit=200, epsabs=1e-12, epsrel=1e-12)
    return value


def uniform_params() -> np.ndarray:
    """Raw spline parameters whose quantile function is α on [0, 1]."""
    params = np.zeros(SPLINE_WIDTH)
    params[1] = np.log(np.e - 1.0)
    params[2:1 + SPLINE_PIECES] = -40.0
    params[1 + SPLINE_PIECES:] = 40.0
    return params


def crps_oracle(pairs: int = 100, seed: int = 0) -> OracleReport:
    """Closed-form CRPS against quadrature, plus the uniform case CRPS(U[0,1], ½) = 1/12."""
    rng = derive_rng(seed, "oracle-crps")
    failures = []
    worst = 0.0
    for i in range(pairs):
        params = rng.normal(size=SPLINE_WIDTH)
        y = float(params[0] + rng.normal(scale=2.0))
        with no_tape():
            closed = crps_pwl(params, y).item()
        error = abs(closed - quadrature_crps(params, y))
        worst = max(worst, error)
        if error >= CRPS_TOLERANCE or closed < 0:
            failures.append(f"pair {i}: closed form {closed:.9g}, error {error:.3g}")

    with no_tape():
        uniform = crps_pwl(uniform_params(), 0.5).item()
    if abs(uniform - 1.0 / 12.0) >= UNIFORM_TOLERANCE:
        failures.append(f"uniform: {uniform!r} != 1/12")
    return OracleReport("crps", not failures, pairs + 1, worst, failures)


def _score(value) -> DiffValue:
    """Scalar projection with weights fixed by the output shape."""
    shape = value.data.shape
    projection = np.random.default_rng(len(shape) * 1000 + int(np.prod(shape))).normal(size=shape)
    return ops.sum(ops.mul(value, projection))


def _primitive_programs(rng: np.random.Generator) -> dict[str, tuple[Callable, dict]]:
    """One small program per differentiable primitive, kept away from kinks."""
    a = ops.parameter(rng.normal(size=(3, 4)), name="a")
    b = ops.parameter(rng.normal(size=(3, 4)), name="b")
    positive = ops.parameter(1.5 + rng.uniform(size=(3, 4)), name="positive")
    m = ops.parameter(rng.normal(size=(4, 2)), name="m")
    away = ops.parameter(np.sign(rng.normal(size=(3, 4))) * (0.5 + rng.uniform(size=(3, 4))), name="away")
    gap = ops.parameter(a.data + np.where(rng.uniform(size=(3, 4)) < 0.5, -1.0, 1.0), name="gap")
    grid = ops.parameter(rng.normal(size=(2, 4, 3, 2)), name="grid")
    kernel = ops.parameter(rng.normal(size=(3, 3, 2, 2)), name="kernel")
    spread = rng.normal(size=(3, 4))

    def case(build, *values):
        return (lambda: _score(build()), {v.name: v for v in values})

    return {
        "add": case(lambda: ops.add(a, b), a, b),
        "sub": case(lambda: ops.sub(a, b), a, b),
        "mul": case(lambda: ops.mul(a, b), a, b),
        "div": case(lambda: ops.div(a, positive), a, positive),
        "neg": case(lambda: ops.neg(a), a),
        "matmul": case(lambda: ops.matmul(a, m), a, m),
        "conv2d": case(lambda: ops.conv2d(grid, kernel), grid, kernel),
        "conv2d-periodic": case(lambda: ops.conv2d(grid, kernel, padding="periodic"), grid, kernel),
        "sigmoid": case(lambda: ops.sigmoid(a), a),
        "tanh": case(lambda: ops.tanh(a), a),
        "relu": case(lambda: ops.relu(away), away),
        "abs": case(lambda: ops.abs(away), away),
        "softplus": case(lambda: ops.softplus(a), a),
        "exp": case(lambda: ops.exp(a), a),
        "square": case(lambda: ops.square(a), a),
        "softmax": case(lambda: ops.softmax(a, axis=-1), a),
        "cumsum": case(lambda: ops.cumsum(a, axis=0), a),
        "maximum": case(lambda: ops.maximum(a, gap), a, gap),
        "sum": case(lambda: ops.mul(ops.sum(a, axis=1, keepdims=True), spread), a),
        "mean": case(lambda: ops.mean(ops.mul(a, spread), axis=0), a),
        "concat": case(lambda: ops.concat([a, b], axis=0), a, b),
        "stack": case(lambda: ops.stack([a, b], axis=1), a, b),
        "reshape": case(lambda: ops.reshape(a, (2, 6)), a),
        "transpose": case(lambda: ops.transpose(a), a),
        "getitem": case(lambda: ops.getitem(a, (slice(None), 1)), a),
        "composition": case(lambda: ops.tanh(ops.matmul(ops.sigmoid(ops.mul(a, b)), m)), a, b, m),
    }


def _loss_program(head_kind: HeadKind, seed: int) -> tuple[Callable, dict]:
    """Training objective of a tiny 3-node graph model with horizon 2."""
    rng = derive_rng(seed, f"oracle-loss-{head_kind.value}")
    config = ModelConfig(
        cell_kind=CellKind.GRAPH_CONV,
        nodes=3,
        features=1,
        hidden_units=4,
        horizon=2,
        head_kind=head_kind,
    )
    adjacency = rng.uniform(0.2, 1.0, size=(3, 3))
    np.fill_diagonal(adjacency, 0.0)
    model = ModelFactory.create(config, SpatialGraph(adjacency), seed=seed)
    history = rng.normal(size=(2, 3, 3, 1))
    targets = rng.normal(size=(2, 2, 3, 1))
    weights = np.ones_like(targets)
    weights[0, 1, 2, 0] = 0.0
    objective = objective_for(head_kind, TrainConfig(), rho=0.1)

    def program():
        return objective(model.forward(history), targets, weights)

    return program, model.parameters


def gradient_oracle(seed: int = 0, heads: Sequence[HeadKind] = tuple(HeadKind)) -> OracleReport:
    """Every differentiable primitive and every training loss against central differences."""
    rng = derive_rng(seed, "oracle-gradient")
    programs = _primitive_programs(rng)
    for kind in heads:
        programs[f"loss:{kind.value}"] = _loss_program(kind, seed)

    failures = []
    worst = 0.0
    for name, (program, parameters) in programs.items():
        error = finite_difference_check(program, parameters, GRADIENT_STEP)
        worst = max(worst, error)
        logger.debug(f"Gradient check {name}: relative error {error:.3g}")
        if error >= GRADIENT_TOLERANCE:
            failures.append(f"{name}: relative error {error:.3g}")
    return OracleReport("gradient", not failures, len(programs), worst, failures)


ORACLES: dict[str, Callable[..., OracleReport]] = {
    "interval": interval_oracle,
    "crps": crps_oracle,
    "gradient": gradient_oracle,
}


def run_oracles(names: Optional[Sequence[str]] = None, seed: int = 0) -> list[OracleReport]:
    names = list(names or ORACLES)
    unknown = [n for n in names if n not in ORACLES]
    if unknown:
        raise ConfigError(f"Unknown oracle suites: {unknown}; choose from {sorted(ORACLES)}")
    reports = []
    for name in names:
        report = ORACLES[name](seed=seed)
        level = logging.INFO if report.passed else logging.ERROR
        logger.log(level, f"Oracle {name}: {'pass' if report.passed else 'FAIL'} over {report.cases} cases")
        reports.append(report)
    return reports


def format_report(reports: Sequence[OracleReport]) -> str:
    """Plain-text pass/fail table."""
    lines = [f"{'suite':<10} {'result':<6} {'cases':>5}  worst"]
    for r in reports:
        lines.append(f"{r.name:<10} {'pass' if r.passed else 'FAIL':<6} {r.cases:>5}  {r.worst:.3g}")
        lines.extend(f"    {d}" for d in r.detail[:10])
    return "\n".join(lines)
