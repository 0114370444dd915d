"""Seeded random problem family: column-normalized Gaussian matrices and planted sparse signals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Problem, SparseSignal

__all__ = ["EnsembleSpec", "SIGN_MODES", "trial_seed", "gaussian_matrix", "sparse_signal", "make_problem"]

SIGN_MODES = ("gaussian", "pm1", "nonneg")

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleSpec:
    m: int = 50
    n: int = 200
    k: int = 1
    trials: int = 100
    seed: int = 0
    sign_mode: str = "gaussian"

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")


def trial_seed(seed: int, trial_index: int) -> int:
    """Per-trial sub-seed: splitmix64 finalizer applied to ``seed ^ ((trial_index + 1) * golden)``.

    Only (seed, trial_index) enter, so for a given trial the matrix is shared
    across sparsity levels and the supports are nested prefixes of one permutation.
    """
    z = (seed ^ ((trial_index + 1) * 0x9E3779B97F4A7C15)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def gaussian_matrix(m, n, rng):
    """i.i.d. standard normal entries, each column scaled to unit 2-norm."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    phi = rng.standard_normal((m, n))
    norms = np.linalg.norm(phi, axis=0)
    while np.any(norms == 0):
        bad = np.flatnonzero(norms == 0)
        phi[:, bad] = rng.standard_normal((m, bad.size))
        norms = np.linalg.norm(phi, axis=0)
    return phi / norms


def sparse_signal(n, k, rng, sign_mode="gaussian") -> SparseSignal:
    """k-sparse vector with a uniformly random support.

    Values are standard normal ("gaussian"), random signs of unit magnitude
    ("pm1"), or absolute values of standard normals ("nonneg").
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    support = rng.permutation(n)[:k]
    draws = rng.standard_normal(k)
    if sign_mode == "gaussian":
        vals = draws
    elif sign_mode == "pm1":
        vals = np.where(draws < 0, -1.0, 1.0)
    elif sign_mode == "nonneg":
        vals = np.abs(draws)
    else:
        raise ValueError(f"unknown sign_mode {sign_mode!r}")
    # a draw of exactly 0.0 would break the support invariant
    vals = np.where(vals == 0, np.finfo(float).tiny, vals)
    x = np.zeros(n)
    x[support] = vals
    return SparseSignal(x, support)


def make_problem(spec: EnsembleSpec, trial_index: int) -> Problem:
    if not 0 <= trial_index < spec.trials:
        raise IndexError(f"trial_index {trial_index} outside [0, {spec.trials})")
    rng = np.random.default_rng(trial_seed(spec.seed, trial_index))
    phi = gaussian_matrix(spec.m, spec.n, rng)
    signal = sparse_signal(spec.n, spec.k, rng, spec.sign_mode)
    return Problem(
        phi,
        phi @ signal.values,
        signal.values,
        label=f"m{spec.m}-n{spec.n}-k{spec.k}-seed{spec.seed}-trial{trial_index}",
    )
