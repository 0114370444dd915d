"""Shared types: problems, sparse signals, solver results and the error vocabulary."""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "DimensionError",
    "InputError",
    "NumericError",
    "DegenerateStateError",
    "ProblemFormatError",
    "Problem",
    "SparseSignal",
    "SolveResult",
    "relative_error",
    "format_problem",
    "parse_problem",
    "load_problem",
    "save_problem",
]


class DimensionError(ValueError):
    """Array lengths or shapes that do not line up."""


class InputError(ValueError):
    """Non-finite or otherwise invalid numeric input."""


class NumericError(ArithmeticError):
    """A factorization broke down."""

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateStateError(RuntimeError):
    """Solver state that cannot be advanced."""


class ProblemFormatError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _frozen(a, ndim, name):
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Problem:
    """Measurement matrix ``phi`` (M x N), observations ``b`` and an optional planted truth.

    Arrays are copied and made read-only so a problem can be handed to several
    solvers (or worker processes) without any of them altering it.
    """

    phi: np.ndarray
    b: np.ndarray
    ground_truth: Optional[np.ndarray] = None
    label: Optional[str] = None

    def __post_init__(self):
        phi = _frozen(self.phi, 2, "phi")
        b = _frozen(self.b, 1, "b")
        m, n = phi.shape
        if m < 1 or n < 1:
            raise DimensionError("phi must have at least one row and one column")
        if b.shape[0] != m:
            raise DimensionError(f"b has length {b.shape[0]}, expected {m}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "b", b)
        if self.ground_truth is not None:
            truth = _frozen(self.ground_truth, 1, "ground_truth")
            if truth.shape[0] != n:
                raise DimensionError(f"ground_truth has length {truth.shape[0]}, expected {n}")
            object.__setattr__(self, "ground_truth", truth)

    @property
    def m(self) -> int:
        return self.phi.shape[0]

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    def digest(self) -> str:
        """SHA-256 over the raw bytes of phi, b and the truth (if any)."""
        h = hashlib.sha256()
        h.update(np.asarray(self.phi.shape, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.phi).tobytes())
        h.update(self.b.tobytes())
        if self.ground_truth is not None:
            h.update(self.ground_truth.tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class SparseSignal:
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values, 1, "values")
        support = np.array(sorted(int(i) for i in self.support), dtype=np.intp)
        nonzero = np.flatnonzero(values)
        if not np.array_equal(nonzero, support):
            raise InputError("support must list exactly the nonzero entries of values")
        support.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)

    @property
    def sparsity_k(self) -> int:
        return int(self.support.size)


@dataclass
class SolveResult:
    """Output of any solver in the package.

    ``trace`` holds one signal estimate per iteration when tracing was
    requested, so ``len(trace) == iterations``.
    """

    x_hat: np.ndarray
    u_final: np.ndarray
    iterations: int
    converged: bool
    residual_norm: float
    trace: Optional[list] = None
    info: dict = field(default_factory=dict)


def relative_error(x_hat, x_true) -> float:
    """``||x_hat - x_true|| / ||x_true||``; falls back to ``||x_hat||`` when the truth is zero."""
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if x_hat.shape != x_true.shape:
        raise DimensionError(f"length mismatch: {x_hat.shape} vs {x_true.shape}")
    denom = np.linalg.norm(x_true)
    if denom == 0:
        return float(np.linalg.norm(x_hat))
    return float(np.linalg.norm(x_hat - x_true) / denom)


# -- plain-text problem format -------------------------------------------------
#
#   M N
#   <M lines of N decimals>      phi
#   <one line of M decimals>     b
#   truth: <N decimals>          optional

def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_problem(problem: Problem) -> str:
    lines = [f"{problem.m} {problem.n}"]
    lines.extend(_fmt(row) for row in problem.phi)
    lines.append(_fmt(problem.b))
    if problem.ground_truth is not None:
        lines.append("truth: " + _fmt(problem.ground_truth))
    return "\n".join(lines) + "\n"


def _floats(text, count, lineno):
    parts = text.split()
    if len(parts) != count:
        raise ProblemFormatError(f"expected {count} numbers, found {len(parts)}", lineno)
    try:
        out = [float(p) for p in parts]
    except ValueError as exc:
        raise ProblemFormatError(f"not a number: {exc}", lineno) from None
    if not all(np.isfinite(out)):
        raise ProblemFormatError("non-finite value", lineno)
    return out


def parse_problem(text: str, label=None) -> Problem:
    # keep original line numbers for diagnostics, skip blank lines
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise ProblemFormatError("empty problem file", 1)
    lineno, header = lines[0]
    try:
        m, n = (int(t) for t in header.split())
    except ValueError:
        raise ProblemFormatError("header must be 'M N'", lineno) from None
    if m < 1 or n < 1:
        raise ProblemFormatError("M and N must be positive", lineno)
    if len(lines) < m + 2:
        last = lines[-1][0]
        raise ProblemFormatError(f"expected {m} matrix rows and a b line", last + 1)
    phi = [_floats(ln, n, no) for no, ln in lines[1 : m + 1]]
    no, ln = lines[m + 1]
    b = _floats(ln, m, no)
    truth = None
    rest = lines[m + 2 :]
    if rest:
        no, ln = rest[0]
        if not ln.lstrip().startswith("truth:"):
            raise ProblemFormatError("unexpected content after b (expected 'truth:')", no)
        truth = _floats(ln.split(":", 1)[1], n, no)
        if len(rest) > 1:
            raise ProblemFormatError("trailing content", rest[1][0])
    return Problem(np.array(phi), np.array(b), None if truth is None else np.array(truth), label)


def load_problem(path) -> Problem:
    with open(path) as fh:
        return parse_problem(fh.read(), label=os.path.basename(str(path)))


def save_problem(problem: Problem, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_problem(problem))
