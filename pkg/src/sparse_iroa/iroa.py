"""Iteratively reweighed operator algorithm (IROA).

Each iteration reweighs the columns of ``phi`` by ``lam = u**p`` (signed integer
power), solves the ridge problem

    min_v ||phi diag(lam) v - b||^2 + mu ||v||^2

on the still-active columns, and takes ``x = lam * v`` as the signal estimate.
Because ``phi x`` is the quantity fitted to ``b``, ``x`` is what gets reported.

Two update rules are available for the next iterate ``u``:

* ``rebalance=True`` (default): ``u`` is re-derived from the estimate as the
  signed ``(p+1)``-th root of ``x``, so ``lam * u == x`` holds exactly between
  iterations. This makes every iteration a majorize-minimize step for
  ``||phi s - b||^2 + mu * sum |s_i|^(2/(p+1))`` and the iteration converges.
  An adaptive smoothing level ``delta`` replaces ``x_i**2`` by
  ``x_i**2 + (delta * max|x|)**2`` inside the root while it is positive;
  ``delta`` tracks the M-th largest magnitude of ``x`` relative to its peak
  and is switched off once it falls under ``smoothing_floor``.
* ``rebalance=False``: ``u`` is the ridge minimizer itself. Once the support
  is fitted exactly this map multiplies ``log|u|`` by ``-p``, so for ``p >= 2``
  it oscillates without settling; kept for comparison.

Columns whose ``|u_i|`` falls below ``prune_tau * max|u|`` are dropped for good.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .model import DegenerateStateError, DimensionError, InputError, Problem, SolveResult
from .ridge import ridge_solve

__all__ = [
    "IroaConfig",
    "IroaState",
    "reweight",
    "signed_power",
    "signed_root",
    "estimate_signal",
    "prune",
    "has_converged",
    "initial_state",
    "iroa_step",
    "iroa_solve",
    "iroa_solve_schedule",
]


@dataclass(frozen=True)
class IroaConfig:
    p: int = 2
    mu: float = 1e-6
    epsilon: float = 1e-3
    max_iters: int = 100
    prune_tau: float = 1e-4
    p_schedule: Optional[Sequence[int]] = None
    record_trace: bool = False
    rebalance: bool = True
    smoothing: bool = True
    smoothing_floor: float = 1e-10

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.prune_tau >= 0:
            raise ValueError(f"prune_tau must be nonnegative, got {self.prune_tau}")
        if self.p_schedule is not None:
            sched = tuple(int(q) for q in self.p_schedule)
            if not sched:
                raise ValueError("p_schedule must be nonempty")
            if any(q < 1 for q in sched) or any(a > b for a, b in zip(sched, sched[1:])):
                raise ValueError(f"p_schedule must be nondecreasing positive integers, got {sched}")
            object.__setattr__(self, "p_schedule", sched)


@dataclass(frozen=True, eq=False)
class IroaState:
    u: np.ndarray
    lam: np.ndarray
    active: np.ndarray
    iter: int = 0
    x: Optional[np.ndarray] = None
    smoothing: float = 0.0


def signed_power(u, p):
    return np.sign(u) * np.abs(u) ** p


def signed_root(x, r):
    """Componentwise ``sgn(x) |x|**(1/r)``."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** (1.0 / r)


def reweight(u, p):
    """Diagonal of the reweighing operator, ``u_i**p`` with the sign kept for odd p."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise InputError("non-finite iterate passed to reweight")
    return np.power(u, int(p))


def estimate_signal(prev_lam, u_next):
    prev_lam = np.asarray(prev_lam, dtype=float)
    u_next = np.asarray(u_next, dtype=float)
    if prev_lam.shape != u_next.shape:
        raise DimensionError(f"length mismatch: {prev_lam.shape} vs {u_next.shape}")
    return prev_lam * u_next


def prune(state: IroaState, tau: float) -> IroaState:
    """Drop active indices with ``|u_i| < tau * max_active |u_j|``.

    An all-zero iterate empties the active set.
    """
    if tau == 0 or state.active.size == 0:
        return state
    mags = np.abs(state.u[state.active])
    peak = mags.max()
    if peak == 0:
        drop = state.active
        keep = state.active[:0]
    else:
        small = mags < tau * peak
        if not small.any():
            return state
        drop = state.active[small]
        keep = state.active[~small]
    u = state.u.copy()
    lam = state.lam.copy()
    u[drop] = 0.0
    lam[drop] = 0.0
    return replace(state, u=u, lam=lam, active=keep)


def has_converged(u_prev, u_next, epsilon) -> bool:
    """Relative 2-norm change below ``epsilon / 100``."""
    u_prev = np.asarray(u_prev, dtype=float)
    u_next = np.asarray(u_next, dtype=float)
    if u_prev.shape != u_next.shape:
        raise DimensionError(f"length mismatch: {u_prev.shape} vs {u_next.shape}")
    ref = np.linalg.norm(u_prev)
    if ref == 0:
        return not np.any(u_next)
    return bool(np.linalg.norm(u_next - u_prev) / ref < epsilon / 100)


def _next_smoothing(x, level, m, floor):
    if level == 0:
        return 0.0
    mags = np.abs(x)
    peak = mags.max()
    if peak == 0:
        return 0.0
    if mags.size < m:
        return 0.0
    # magnitude of the M-th largest entry; zero once x is sparser than M
    ref = np.partition(mags, mags.size - m)[mags.size - m]
    level = min(level, ref / peak)
    if level < floor:
        return 0.0
    return float(level)


def _rebalanced(x, p, level):
    if level == 0:
        return signed_root(x, p + 1)
    d = level * np.abs(x).max()
    # sign(0) = 0 keeps exactly-zero entries at zero
    return np.sign(x) * (x * x + d * d) ** (0.5 / (p + 1))


def initial_state(n, p, smoothing=0.0, u0=None, active=None) -> IroaState:
    u = np.ones(n) if u0 is None else np.array(u0, dtype=float)
    if active is None:
        active = np.arange(n)
    else:
        active = np.array(sorted(active), dtype=np.intp)
        mask = np.ones(n, dtype=bool)
        mask[active] = False
        u[mask] = 0.0
    lam = reweight(u, p)
    return IroaState(u=u, lam=lam, active=active, iter=0, x=None, smoothing=float(smoothing))


def iroa_step(problem: Problem, state: IroaState, config: IroaConfig, p=None) -> IroaState:
    p = config.p if p is None else p
    act = state.active
    if act.size == 0:
        raise DegenerateStateError("active set is empty")
    a = problem.phi[:, act] * state.lam[act]
    v = ridge_solve(a, problem.b, config.mu)
    u_raw = np.zeros(problem.n)
    u_raw[act] = v
    x = estimate_signal(state.lam, u_raw)

    level = 0.0
    if config.rebalance:
        level = _next_smoothing(x[act], state.smoothing, problem.m, config.smoothing_floor)
        u = np.zeros(problem.n)
        u[act] = _rebalanced(x[act], p, level)
    else:
        u = u_raw
    lam = np.zeros(problem.n)
    lam[act] = reweight(u[act], p)
    nxt = IroaState(u=u, lam=lam, active=act, iter=state.iter + 1, x=x, smoothing=level)
    return prune(nxt, config.prune_tau)


def _run(problem, config, p, state, callback=None):
    trace = [] if config.record_trace else None
    iters = 0
    converged = False
    while iters < config.max_iters:
        new = iroa_step(problem, state, config, p=p)
        iters += 1
        if trace is not None:
            trace.append(new.x.copy())
        if callback is not None:
            callback(new)
        done = new.active.size == 0 or (
            new.smoothing == 0 and has_converged(state.u, new.u, config.epsilon)
        )
        state = new
        if done:
            converged = True
            break
    if state.active.size == 0:
        x_hat = np.zeros(problem.n)
    elif state.x is None:
        x_hat = np.zeros(problem.n)
    else:
        x_hat = state.x.copy()
    return state, x_hat, iters, converged, trace


def _result(problem, state, x_hat, iters, converged, trace, p):
    return SolveResult(
        x_hat=x_hat,
        u_final=state.u.copy(),
        iterations=iters,
        converged=converged,
        residual_norm=float(np.linalg.norm(problem.phi @ x_hat - problem.b)),
        trace=trace,
        info={
            "p": p,
            "active_size": int(state.active.size),
            "smoothing": state.smoothing,
            "signal_convention": "x = lambda_prev * u_next",
        },
    )


def iroa_solve(
    problem: Problem,
    config: IroaConfig = IroaConfig(),
    callback: Optional[Callable[[IroaState], None]] = None,
) -> SolveResult:
    """Run IROA from the all-ones iterate until the stopping rule or ``max_iters``.

    ``callback`` receives the state after every step.
    """
    level = 1.0 if (config.rebalance and config.smoothing) else 0.0
    state = initial_state(problem.n, config.p, smoothing=level)
    state, x_hat, iters, converged, trace = _run(problem, config, config.p, state, callback)
    return _result(problem, state, x_hat, iters, converged, trace, config.p)


def iroa_solve_schedule(
    problem: Problem,
    config: IroaConfig,
    callback: Optional[Callable[[IroaState], None]] = None,
) -> SolveResult:
    """Run IROA stage by stage over ``config.p_schedule``.

    Each later stage starts from the signed ``(p+1)``-th root of the previous
    estimate on the surviving columns, with the previous stage's smoothing level.
    """
    if not config.p_schedule:
        raise ValueError("config.p_schedule is required")
    schedule = config.p_schedule
    total = 0
    trace = [] if config.record_trace else None
    state = None
    x_hat = None
    converged = False
    for stage, p in enumerate(schedule):
        if stage == 0:
            level = 1.0 if (config.rebalance and config.smoothing) else 0.0
            state = initial_state(problem.n, p, smoothing=level)
        else:
            if state.active.size == 0:
                break
            state = initial_state(
                problem.n, p, smoothing=state.smoothing,
                u0=signed_root(x_hat, p + 1), active=state.active,
            )
        state, x_hat, iters, converged, stage_trace = _run(problem, config, p, state, callback)
        total += iters
        if trace is not None:
            trace.extend(stage_trace)
    return _result(problem, state, x_hat, total, converged, trace, schedule[-1])
