"""Sparse recovery with the iteratively reweighed operator algorithm (IROA) and baselines."""
__version__ = "0.1.0"

from .model import Problem, SolveResult, SparseSignal, relative_error  # noqa: E402
from .iroa import IroaConfig, iroa_solve, iroa_solve_schedule  # noqa: E402

__all__ = [
    "Problem",
    "SolveResult",
    "SparseSignal",
    "relative_error",
    "IroaConfig",
    "iroa_solve",
    "iroa_solve_schedule",
]
