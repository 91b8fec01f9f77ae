"""Backtracking gradient descent shared by both factorisation solvers.

The iteration is Z <- Z - eta * grad with eta from an Armijo search:
accept the first eta with

    f(Z - eta * G) <= f(Z) - c * eta * ||G||_F^2,

shrinking eta by ``shrink`` up to ``max_backtracks`` times.  Each
iteration warm-starts from min(growth * eta_prev, step0 * growth**8).
A single step size is shared by all channels; the state is one stacked
complex array.

Stopping: relative change of the reconstructed signal between accepted
iterates falls below ``tol``, or ``max_iter`` accepted steps.  Exhausted
backtracking and non-finite values are reported through
``SolverReport.stop_reason`` rather than raised.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

STOP_CONVERGED = "converged"
STOP_MAX_ITER = "max_iter"
STOP_LINE_SEARCH = "line_search_failure"
STOP_NUMERICAL = "numerical_failure"


@dataclass(frozen=True)
class ArmijoConfig:
    step0: float = 1.0
    shrink: float = 0.5
    decrease: float = 1e-4
    growth: float = 2.0
    max_backtracks: int = 50

    def __post_init__(self):
        if not (0 < self.shrink < 1):
            raise ValueError("shrink must lie in (0, 1)")
        if not (0 < self.decrease < 1):
            raise ValueError("decrease must lie in (0, 1)")
        if self.growth < 1 or self.step0 <= 0 or self.max_backtracks < 1:
            raise ValueError("growth >= 1, step0 > 0, max_backtracks >= 1 required")

    @property
    def step_cap(self) -> float:
        return self.step0 * self.growth**8


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-6
    max_iter: int = 10_000
    armijo: ArmijoConfig = field(default_factory=ArmijoConfig)
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")


@dataclass
class SolverReport:
    """Outcome of one solver run; ``x_hat`` keeps the user's N rows."""

    x_hat: np.ndarray
    iterations: int
    stop_reason: str
    objective_trace: list
    iter_seconds: list
    total_seconds: float
    nmse: Optional[float] = None

    @property
    def converged(self) -> bool:
        return self.stop_reason == STOP_CONVERGED


class ArmijoResult(NamedTuple):
    accepted: bool
    eta: float
    state: np.ndarray
    value: float


def armijo_step(state: np.ndarray, grad: np.ndarray, f_curr: float,
                objective: Callable[[np.ndarray], float],
                cfg: ArmijoConfig, eta_prev: float) -> ArmijoResult:
    """One backtracking step from the warm-started trial size.

    A zero gradient is accepted immediately with the state unchanged.
    ``accepted=False`` means ``max_backtracks`` shrinks never met the
    sufficient-decrease condition.
    """
    gnorm_sq = float(np.vdot(grad, grad).real)
    eta = min(cfg.growth * eta_prev, cfg.step_cap)
    if gnorm_sq == 0.0:
        return ArmijoResult(True, eta, state, f_curr)
    for _ in range(cfg.max_backtracks):
        cand = state - eta * grad
        f_new = objective(cand)
        # NaN fails the comparison and keeps shrinking
        if f_new <= f_curr - cfg.decrease * eta * gnorm_sq:
            return ArmijoResult(True, eta, cand, f_new)
        eta *= cfg.shrink
    return ArmijoResult(False, eta, state, f_curr)


class DescentOutcome(NamedTuple):
    state: np.ndarray
    x_hat: np.ndarray
    iterations: int
    stop_reason: str
    objective_trace: list
    iter_seconds: list
    total_seconds: float


def _rel_change(x_new: np.ndarray, x_old: np.ndarray) -> float:
    denom = np.linalg.norm(x_old)
    diff = np.linalg.norm(x_new - x_old)
    if denom == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return float(diff / denom)


def run_descent(state0: np.ndarray,
                objective: Callable[[np.ndarray], float],
                grad_and_lift: Callable[[np.ndarray], tuple],
                lift_to_signal: Callable[[np.ndarray], np.ndarray],
                cfg: SolverConfig) -> DescentOutcome:
    """Drive the shared loop.

    ``grad_and_lift(state)`` returns (gradient, h) where h is the lifted
    adjoint vector the reconstruction is read from; ``lift_to_signal(h)``
    turns it into the signal used for the stopping rule.
    """
    t_start = time.perf_counter()
    state = state0
    f_curr = objective(state)
    trace = [f_curr]
    iter_seconds: list = []
    grad, h = grad_and_lift(state)
    x_curr = lift_to_signal(h)
    if not np.isfinite(f_curr):
        return DescentOutcome(state, x_curr, 0, STOP_NUMERICAL, trace, iter_seconds,
                              time.perf_counter() - t_start)
    eta_prev = cfg.armijo.step0 / cfg.armijo.growth  # first trial is exactly step0
    stop_reason = STOP_MAX_ITER
    iters = 0
    for _ in range(cfg.max_iter):
        t0 = time.perf_counter()
        if not np.all(np.isfinite(grad)):
            stop_reason = STOP_NUMERICAL
            break
        res = armijo_step(state, grad, f_curr, objective, cfg.armijo, eta_prev)
        if not res.accepted:
            stop_reason = STOP_LINE_SEARCH
            break
        state, f_curr, eta_prev = res.state, res.value, res.eta
        grad, h = grad_and_lift(state)
        x_new = lift_to_signal(h)
        iters += 1
        trace.append(f_curr)
        iter_seconds.append(time.perf_counter() - t0)
        rel = _rel_change(x_new, x_curr)
        x_curr = x_new
        if rel <= cfg.tol:
            stop_reason = STOP_CONVERGED
            break
    return DescentOutcome(state, x_curr, iters, stop_reason, trace, iter_seconds,
                          time.perf_counter() - t_start)
