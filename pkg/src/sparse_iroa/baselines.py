"""Comparison solvers and a brute-force sparsest-solution oracle.

* ``iht_solve``   normalized iterative hard thresholding (Blumensath & Davies)
* ``irls_solve``  equality-constrained IRLS for ``min ||u||_p^p s.t. phi u = b``
* ``ista_solve``  proximal gradient for ``mu ||u||_1 + ||phi u - b||^2``
* ``brute_force_sparsest``  exhaustive support search, desk-scale only
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numba
import numpy as np
import scipy.linalg

from .model import InputError, NumericError, Problem, SolveResult

__all__ = [
    "IhtConfig",
    "IrlsConfig",
    "OracleResult",
    "hard_threshold",
    "soft_threshold",
    "iht_solve",
    "irls_solve",
    "ista_solve",
    "ista_objective",
    "power_method_bound",
    "brute_force_sparsest",
]


def _result(problem, x, iters, converged, trace, **info):
    return SolveResult(
        x_hat=x,
        u_final=x.copy(),
        iterations=iters,
        converged=converged,
        residual_norm=float(np.linalg.norm(problem.phi @ x - problem.b)),
        trace=trace,
        info=info,
    )


# -- iterative hard thresholding ---------------------------------------------

@dataclass(frozen=True)
class IhtConfig:
    sparsity_k: int
    max_iters: int = 500
    tol: float = 1e-6
    # step acceptance: shrink while step > (1 - c) ||dx||^2 / ||phi dx||^2
    c: float = 0.01
    shrink: float = 2.0

    def __post_init__(self):
        if self.sparsity_k < 1:
            raise ValueError("sparsity_k must be positive")
        if self.max_iters < 1 or not self.tol > 0:
            raise ValueError("max_iters and tol must be positive")


def hard_threshold(v, k):
    """Keep the k largest-magnitude entries; ties go to the lower index.

    Returns the thresholded vector and its sorted support.
    """
    order = np.argsort(-np.abs(v), kind="stable")[:k]
    out = np.zeros_like(v)
    out[order] = v[order]
    return out, np.sort(order)


def iht_solve(problem: Problem, config: IhtConfig, record_trace=False) -> SolveResult:
    phi, b = problem.phi, problem.b
    k = config.sparsity_k
    if k > problem.n:
        raise ValueError(f"sparsity_k={k} exceeds N={problem.n}")
    x = np.zeros(problem.n)
    trace = [] if record_trace else None
    nb = np.linalg.norm(b)
    if nb == 0:
        return _result(problem, x, 0, True, trace)
    _, supp = hard_threshold(phi.T @ b, k)
    for it in range(1, config.max_iters + 1):
        g = phi.T @ (b - phi @ x)
        g_s = g[supp]
        denom = np.linalg.norm(phi[:, supp] @ g_s) ** 2
        if denom == 0:
            return _result(problem, x, it - 1, True, trace)
        step = (g_s @ g_s) / denom
        while True:
            x_new, supp_new = hard_threshold(x + step * g, k)
            if np.array_equal(supp_new, supp):
                break
            dx = x_new - x
            pdx = np.linalg.norm(phi @ dx) ** 2
            if pdx == 0 or step <= (1 - config.c) * (dx @ dx) / pdx:
                break
            step /= config.shrink
        x, supp = x_new, supp_new
        if trace is not None:
            trace.append(x.copy())
        if np.linalg.norm(b - phi @ x) / nb < config.tol:
            return _result(problem, x, it, True, trace)
    return _result(problem, x, config.max_iters, False, trace)


# -- IRLS ---------------------------------------------------------------------

@dataclass(frozen=True)
class IrlsConfig:
    p_norm: float = 1.0
    eps_smooth: float = 1.0
    eps_floor: float = 1e-8
    max_iters: int = 200

    def __post_init__(self):
        if not 0 < self.p_norm <= 1:
            raise ValueError(f"p_norm must lie in (0, 1], got {self.p_norm}")
        if not 0 < self.eps_floor < self.eps_smooth:
            raise ValueError("need 0 < eps_floor < eps_smooth")


def _weighted_min_norm(phi, b, d):
    """``D phi^T (phi D phi^T)^{-1} b`` for diagonal D = diag(d), via QR of (phi D^1/2)^T."""
    s = np.sqrt(d)
    q, r = scipy.linalg.qr((phi * s).T, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= 1e-13 * diag.max():
        raise NumericError("phi W^-1 phi^T is rank deficient", pivot=int(np.argmin(diag)))
    z = scipy.linalg.solve_triangular(r, b, trans="T")
    return s * (q @ z)


def irls_solve(problem: Problem, config: IrlsConfig = IrlsConfig(), record_trace=False) -> SolveResult:
    """Weighted minimum-norm iterations with weights ``(u_i^2 + eps^2)^((p-2)/2)``.

    eps drops tenfold whenever the relative change falls below sqrt(eps).
    """
    phi, b = problem.phi, problem.b
    if problem.m >= problem.n:
        raise ValueError("irls_solve needs an underdetermined system (M < N)")
    trace = [] if record_trace else None
    if not np.any(b):
        x = np.zeros(problem.n)
        return _result(problem, x, 0, True, trace, eps=config.eps_smooth)
    u = _weighted_min_norm(phi, b, np.ones(problem.n))
    eps = config.eps_smooth
    expo = (2.0 - config.p_norm) / 2.0
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        u_new = _weighted_min_norm(phi, b, (u * u + eps * eps) ** expo)
        change = np.linalg.norm(u_new - u) / max(np.linalg.norm(u), np.finfo(float).tiny)
        u = u_new
        if trace is not None:
            trace.append(u.copy())
        if eps <= config.eps_floor and change < 1e-8:
            converged = True
            break
        if change < np.sqrt(eps):
            eps = max(eps / 10, config.eps_floor)
    return _result(problem, u, it, converged, trace, eps=eps)


# -- ISTA ---------------------------------------------------------------------

def soft_threshold(v, theta):
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def ista_objective(phi, b, u, mu):
    r = phi @ u - b
    return float(mu * np.abs(u).sum() + r @ r)


def power_method_bound(phi, iters=50, margin=1.01):
    """``margin`` times a power-method estimate of the top eigenvalue of phi^T phi."""
    v = np.ones(phi.shape[1]) / np.sqrt(phi.shape[1])
    est = 0.0
    for _ in range(iters):
        w = phi.T @ (phi @ v)
        est = np.linalg.norm(w)
        if est == 0:
            return 0.0
        v = w / est
    return margin * est


@numba.njit(cache=True)
def _ista_loop(phi, b, t, mu, max_iters, tol, record):
    m, n = phi.shape
    x = np.zeros(n)
    r = -b.copy()
    obj = r @ r
    theta = t * mu / 2
    history = np.empty(max_iters + 1)
    history[0] = obj
    iterates = np.empty((max_iters if record else 0, n))
    for it in range(1, max_iters + 1):
        g = phi.T @ r
        for j in range(n):
            v = x[j] - t * g[j]
            mag = abs(v) - theta
            x[j] = np.sign(v) * mag if mag > 0 else 0.0
        r = phi @ x - b
        new_obj = mu * np.abs(x).sum() + r @ r
        history[it] = new_obj
        if record:
            iterates[it - 1] = x
        done = obj - new_obj <= tol * max(abs(obj), 1e-300)
        obj = new_obj
        if done:
            return x, it, True, history[: it + 1], iterates[:it]
    return x, max_iters, False, history, iterates


def ista_solve(problem: Problem, mu: float, max_iters: int = 5000, tol: float = 1e-10,
               record_trace=False) -> SolveResult:
    """Fixed-step proximal gradient, ``u <- soft(u - t phi^T (phi u - b), t mu / 2)``.

    ``t = 1/L`` with L from :func:`power_method_bound`. Stops once the objective's
    relative decrease drops below ``tol``. ``info["objective"]`` holds the
    objective after every iteration (entry 0 is the starting point).
    """
    if not mu > 0:
        raise InputError(f"mu must be positive, got {mu}")
    phi, b = problem.phi, problem.b
    lip = power_method_bound(phi)
    if lip == 0:
        x = np.zeros(problem.n)
        return _result(problem, x, 0, True, [] if record_trace else None,
                       objective=np.array([ista_objective(phi, b, x, mu)]))
    x, iters, converged, history, iterates = _ista_loop(
        np.ascontiguousarray(phi), np.ascontiguousarray(b), 1.0 / lip, float(mu),
        int(max_iters), float(tol), bool(record_trace),
    )
    trace = [row.copy() for row in iterates] if record_trace else None
    return _result(problem, x, iters, converged, trace, objective=history)


# -- brute-force oracle ----------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    signal: Optional[np.ndarray]
    support: tuple
    size: int
    unique: bool
    found: bool


def brute_force_sparsest(problem: Problem, k_max: int, rtol: float = 1e-9) -> OracleResult:
    """Enumerate supports of size 1..k_max and return the sparsest exact fit.

    ``unique`` is True when exactly one support of the winning size fits.
    Guarded to N <= 32 and k_max <= 4.
    """
    phi, b = problem.phi, problem.b
    n = problem.n
    if n > 32 or k_max > 4 or k_max < 1:
        raise ValueError(f"oracle limited to N <= 32 and 1 <= k_max <= 4 (got N={n}, k_max={k_max})")
    nb = np.linalg.norm(b)
    if nb == 0:
        return OracleResult(np.zeros(n), (), 0, True, True)
    for size in range(1, k_max + 1):
        hits = []
        for supp in combinations(range(n), size):
            cols = phi[:, supp]
            coef = np.linalg.lstsq(cols, b, rcond=None)[0]
            res = np.linalg.norm(cols @ coef - b)
            if res <= rtol * nb:
                hits.append((res, supp, coef))
        if hits:
            res, supp, coef = min(hits, key=lambda h: h[0])
            x = np.zeros(n)
            x[list(supp)] = coef
            return OracleResult(x, tuple(supp), size, len(hits) == 1, True)
    return OracleResult(None, (), 0, False, False)
