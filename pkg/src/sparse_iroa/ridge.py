"""Ridge (Tikhonov) kernel used as the inner solve of every IROA iteration."""
import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .model import DimensionError, InputError, NumericError

__all__ = ["spd_solve", "ridge_solve", "ridge_primal", "ridge_dual"]


def spd_solve(g, rhs):
    """Solve ``g @ y = rhs`` for symmetric positive-definite ``g`` via Cholesky.

    Raises NumericError carrying the (0-based) index of the first non-positive
    pivot when ``g`` is not positive definite.
    """
    g = np.asarray(g, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f"g must be square, got shape {g.shape}")
    if rhs.shape[0] != g.shape[0]:
        raise DimensionError(f"rhs has length {rhs.shape[0]}, expected {g.shape[0]}")
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(rhs))):
        raise InputError("non-finite entries in spd_solve input")
    c, info = lapack.dpotrf(g, lower=False, clean=True)
    if info > 0:
        raise NumericError(f"matrix not positive definite at pivot {info - 1}", pivot=info - 1)
    if info < 0:
        raise NumericError(f"dpotrf rejected argument {-info}")
    y, info = lapack.dpotrs(c, rhs, lower=False)
    if info != 0:
        raise NumericError(f"dpotrs failed with info={info}")
    return y


def _stacked_factor(a, mu):
    """Triangular R with ``R^T R = a^T a + mu I`` via QR of ``[a; sqrt(mu) I]``.

    Factoring the stacked matrix instead of forming ``a^T a + mu I`` keeps the
    error proportional to cond(R) rather than cond(R)**2.
    """
    s = a.shape[1]
    stacked = np.vstack([a, np.sqrt(mu) * np.eye(s)])
    q, r = scipy.linalg.qr(stacked, mode="economic", check_finite=False)
    d = np.abs(np.diag(r))
    if not np.all(d > 0):
        bad = int(np.flatnonzero(~(d > 0))[0])
        raise NumericError(f"regularized factor is singular at pivot {bad}", pivot=bad)
    return q[: a.shape[0]], r


def ridge_primal(a, b, mu):
    """``(A^T A + mu I)^{-1} A^T b``; factors an S x S system."""
    q1, r = _stacked_factor(a, mu)
    return scipy.linalg.solve_triangular(r, q1.T @ b, check_finite=False)


def ridge_dual(a, b, mu):
    """``A^T (A A^T + mu I)^{-1} b``; factors an M x M system."""
    q1, r = _stacked_factor(a.T, mu)
    # A^T = Q1 R, so A^T (R^T R)^{-1} b = Q1 R^{-T} b
    return q1 @ scipy.linalg.solve_triangular(r, b, trans="T", check_finite=False)


def ridge_solve(a, b, mu, path=None):
    """Minimize ``||a u - b||^2 + mu ||u||^2``.

    The smaller of the two normal systems is factored: primal when the column
    count S <= M, dual otherwise. ``path`` forces "primal" or "dual".
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[1] < 1:
        raise DimensionError(f"a must be a matrix with at least one column, got {a.shape}")
    if b.shape != (a.shape[0],):
        raise DimensionError(f"b has shape {b.shape}, expected ({a.shape[0]},)")
    if not mu > 0:
        raise InputError(f"mu must be positive, got {mu}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(mu)):
        raise InputError("non-finite entries in ridge input")
    if path is None:
        path = "primal" if a.shape[1] <= a.shape[0] else "dual"
    if path == "primal":
        return ridge_primal(a, b, mu)
    if path == "dual":
        return ridge_dual(a, b, mu)
    raise ValueError(f"unknown path {path!r}")
