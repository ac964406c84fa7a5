"""Stochastic subgradient descent with convergence monitoring.

The iteration is ``x <- x - alpha_k * (y_k + zeta_k)`` where ``y_k`` is the
objective's subgradient and ``zeta_k`` optional injected noise.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Schedule",
    "NoiseModel",
    "StopRule",
    "OptState",
    "AssumptionReport",
    "NonFiniteError",
    "init_state",
    "step",
    "run",
    "check_assumptions",
    "write_trace_csv",
]

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], "tuple[float, np.ndarray]"]


class NonFiniteError(FloatingPointError):
    """Objective returned a non-finite loss or subgradient."""


@dataclass(frozen=True)
class Schedule:
    """Learning rate ``a / (1 + b k)`` (``inverse-time``) or ``a`` (``constant``)."""

    kind: str = "inverse-time"
    a: float = 0.1
    b: float = 0.01

    def __post_init__(self):
        if self.kind not in ("inverse-time", "constant"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.a > 0:
            raise ValueError("initial rate a must be positive")
        if self.b < 0:
            raise ValueError("decay b must be non-negative")

    def rate(self, k: int) -> float:
        if self.kind == "constant":
            return self.a
        return self.a / (1.0 + self.b * k)

    @property
    def summable_squares(self) -> bool:
        """Whether the rates satisfy sum a_k = inf and sum a_k^2 < inf."""
        return self.kind == "inverse-time" and self.b > 0


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    stddev: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.stddev < 0:
            raise ValueError("stddev must be non-negative")

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "none" or self.stddev == 0:
            return np.zeros(shape)
        return rng.normal(0.0, self.stddev, size=shape)


@dataclass(frozen=True)
class StopRule:
    """Stop after ``max_steps`` or once the last ``loss_window`` losses span less than the tolerance.

    The tolerance is ``tol`` plus ``rel_tol * |initial loss|``.
    """

    max_steps: int = 1000
    loss_window: int = 200
    tol: float = 1e-12
    rel_tol: float = 1e-3

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.loss_window < 1:
            raise ValueError("loss_window must be >= 1")


@dataclass
class OptState:
    x: np.ndarray
    k: int = 0
    trace: list = field(default_factory=list)
    rng_seed: int = 0
    stop_reason: str | None = None
    x_norms: list = field(default_factory=list)
    noise_sum: float = 0.0
    noise_count: int = 0
    rng: np.random.Generator | None = field(default=None, repr=False)

    def __post_init__(self):
        self.x = np.array(self.x, dtype=np.float64)
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

    @property
    def losses(self) -> np.ndarray:
        return np.array([row[1] for row in self.trace])


def init_state(x0, seed: int = 0) -> OptState:
    return OptState(x=np.array(x0, dtype=np.float64), rng_seed=seed)


def step(state: OptState, objective: Objective, sched: Schedule, noise: NoiseModel = NoiseModel()) -> OptState:
    """One subgradient step; mutates and returns ``state``.

    The trace row ``(k, loss, grad_norm, alpha)`` records the loss and
    subgradient at ``x_k`` and the rate used to leave it.
    """
    loss, grad = objective(state.x)
    loss = float(loss)
    grad = np.asarray(grad, dtype=np.float64).reshape(state.x.shape)
    if not math.isfinite(loss) or not np.all(np.isfinite(grad)):
        raise NonFiniteError(f"step {state.k}: non-finite loss ({loss}) or subgradient")
    alpha = sched.rate(state.k)
    zeta = noise.draw(state.rng, state.x.shape)
    if noise.kind != "none":
        state.noise_sum += float(zeta.sum())
        state.noise_count += zeta.size
    x_new = state.x - alpha * (grad + zeta)
    if not np.all(np.isfinite(x_new)):
        raise NonFiniteError(f"step {state.k}: iterate became non-finite")
    state.trace.append((state.k, loss, float(np.linalg.norm(grad)), alpha))
    state.x_norms.append(float(np.linalg.norm(state.x)))
    state.x = x_new
    state.k += 1
    return state


def run(state: OptState, objective: Objective, sched: Schedule, noise: NoiseModel = NoiseModel(),
        stop: StopRule = StopRule(), callback=None) -> OptState:
    """Iterate until ``stop`` fires; ``state.stop_reason`` is ``"window"`` or ``"max_steps"``."""
    state.stop_reason = None
    start = len(state.trace)
    while len(state.trace) - start < stop.max_steps:
        step(state, objective, sched, noise)
        if callback is not None:
            callback(state)
        losses = [row[1] for row in state.trace[start:]]
        if len(losses) >= stop.loss_window:
            recent = losses[-stop.loss_window:]
            tol = stop.tol + stop.rel_tol * abs(losses[0])
            if max(recent) - min(recent) < tol:
                state.stop_reason = "window"
                break
    else:
        state.stop_reason = "max_steps"
    log.debug("stopped after %d steps (%s)", len(state.trace) - start, state.stop_reason)
    return state


@dataclass
class AssumptionReport:
    step_sizes: bool
    bounded_iterates: bool
    zero_mean_noise: bool
    details: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.step_sizes and self.bounded_iterates and self.zero_mean_noise


def check_assumptions(sched: Schedule, noise: NoiseModel, state: OptState,
                      bound: float = 1e6) -> AssumptionReport:
    """Diagnostic flags for the convergence hypotheses.

    Step sizes are checked analytically, boundedness as ``sup ||x_k|| < bound``
    over the run, and noise as an empirical mean within three standard errors
    of zero.
    """
    norms = state.x_norms + [float(np.linalg.norm(state.x))]
    sup = max(norms) if norms else 0.0
    bounded = math.isfinite(sup) and sup < bound
    if noise.kind == "none" or noise.stddev == 0 or state.noise_count == 0:
        noise_ok, mean, limit = True, 0.0, 0.0
    else:
        mean = state.noise_sum / state.noise_count
        limit = 3 * noise.stddev / math.sqrt(state.noise_count)
        noise_ok = abs(mean) <= limit
    return AssumptionReport(
        step_sizes=sched.summable_squares,
        bounded_iterates=bounded,
        zero_mean_noise=noise_ok,
        details={"sup_norm": sup, "bound": bound, "noise_mean": mean, "noise_limit": limit},
    )


def write_trace_csv(state: OptState, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "loss", "grad_norm", "alpha"])
        for k, loss, gnorm, alpha in state.trace:
            w.writerow([k, repr(loss), repr(gnorm), repr(alpha)])
