"""Recovery-frequency experiments, focusing traces and their export."""
from __future__ import annotations

import csv
import logging
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .baselines import IhtConfig, IrlsConfig, iht_solve, irls_solve, ista_solve
from .ensemble import EnsembleSpec, make_problem
from .iroa import IroaConfig, iroa_solve, iroa_solve_schedule
from .model import Problem, SolveResult, relative_error
from .svg import curve_svg, trace_svg

log = logging.getLogger(__name__)

__all__ = [
    "SOLVER_NAMES",
    "SolverSpec",
    "BenchConfig",
    "CurveCell",
    "RecoveryCurve",
    "TraceTable",
    "run_solver",
    "run_trial",
    "run_experiment",
    "run_trace",
    "export_csv",
    "read_csv",
    "export_trace_csv",
    "export_svg",
    "write_manifest",
    "CSV_HEADER",
]

SOLVER_NAMES = ("iroa", "iht", "irls", "ista")

ISTA_DEFAULTS = {"mu": 1e-3, "max_iters": 20000, "tol": 1e-12}

CSV_HEADER = ["solver", "k", "trials", "successes", "frequency", "mean_iterations", "mean_wall_time_s"]


@dataclass(frozen=True)
class SolverSpec:
    """A solver identifier plus keyword options for its config.

    ``label`` names the curve (defaults to ``name``). IHT receives the cell's k
    as its sparsity target.
    """

    name: str
    options: dict = field(default_factory=dict)
    label: Optional[str] = None

    def __post_init__(self):
        if self.name not in SOLVER_NAMES:
            raise ValueError(f"unknown solver {self.name!r}; expected one of {SOLVER_NAMES}")
        if self.label is None:
            object.__setattr__(self, "label", self.name)


def run_solver(spec: SolverSpec, problem: Problem, k: int) -> SolveResult:
    opts = dict(spec.options)
    if spec.name == "iroa":
        cfg = IroaConfig(**opts)
        return iroa_solve_schedule(problem, cfg) if cfg.p_schedule else iroa_solve(problem, cfg)
    if spec.name == "iht":
        return iht_solve(problem, IhtConfig(sparsity_k=opts.pop("sparsity_k", k), **opts))
    if spec.name == "irls":
        return irls_solve(problem, IrlsConfig(**opts))
    return ista_solve(problem, **{**ISTA_DEFAULTS, **opts})


@dataclass(frozen=True)
class BenchConfig:
    spec: EnsembleSpec
    k_values: Sequence[int]
    solvers: Sequence[SolverSpec]
    success_tol: float = 1e-3
    workers: int = 1

    def __post_init__(self):
        ks = tuple(int(k) for k in self.k_values)
        if not ks:
            raise ValueError("k_values must be nonempty")
        if any(a >= b for a, b in zip(ks, ks[1:])):
            raise ValueError(f"k_values must be strictly increasing, got {ks}")
        if ks[0] < 1 or ks[-1] > self.spec.n:
            raise ValueError(f"k_values must lie in [1, {self.spec.n}]")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        labels = [s.label for s in self.solvers]
        if len(set(labels)) != len(labels):
            raise ValueError(f"solver labels must be distinct, got {labels}")
        if not self.success_tol > 0:
            raise ValueError("success_tol must be positive")
        object.__setattr__(self, "k_values", ks)
        object.__setattr__(self, "solvers", tuple(self.solvers))


@dataclass
class CurveCell:
    trials: int = 0
    successes: int = 0
    failures: int = 0
    iterations_total: float = 0.0
    wall_total: float = 0.0

    @property
    def frequency(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def mean_iterations(self) -> float:
        return self.iterations_total / self.trials if self.trials else 0.0

    @property
    def mean_wall_time(self) -> float:
        return self.wall_total / self.trials if self.trials else 0.0


@dataclass
class RecoveryCurve:
    cells: dict = field(default_factory=dict)

    def cell(self, solver, k) -> CurveCell:
        return self.cells.setdefault((solver, int(k)), CurveCell())

    def solvers(self):
        return sorted({s for s, _ in self.cells})

    def k_values(self, solver=None):
        return sorted(k for s, k in self.cells if solver is None or s == solver)

    def frequencies(self, solver):
        return [self.cells[(solver, k)].frequency for k in self.k_values(solver)]

    def frequency(self, solver, k) -> float:
        return self.cells[(solver, int(k))].frequency

    def table(self) -> str:
        ks = sorted({k for _, k in self.cells})
        width = max([6] + [len(s) for s in self.solvers()])
        lines = ["k".rjust(4) + "".join(s.rjust(width + 2) for s in self.solvers())]
        for k in ks:
            row = str(k).rjust(4)
            for s in self.solvers():
                c = self.cells.get((s, k))
                row += (f"{c.frequency:.2f}" if c else "-").rjust(width + 2)
            lines.append(row)
        return "\n".join(lines)


def run_trial(spec: EnsembleSpec, trial_index: int, solvers: Sequence[SolverSpec], success_tol: float):
    """Build one problem and run every solver on it.

    Returns one record per solver: (label, success, iterations, wall seconds,
    problem digest taken just before the call).
    """
    problem = make_problem(spec, trial_index)
    records = []
    for s in solvers:
        digest = problem.digest()
        t0 = time.perf_counter()
        try:
            res = run_solver(s, problem, spec.k)
        except Exception as exc:  # a failed solve is a non-success, never fatal
            log.warning("solver %s failed on %s: %s", s.label, problem.label, exc)
            records.append((s.label, False, 0, time.perf_counter() - t0, digest, repr(exc)))
            continue
        wall = time.perf_counter() - t0
        ok = bool(np.all(np.isfinite(res.x_hat))) and relative_error(res.x_hat, problem.ground_truth) < success_tol
        records.append((s.label, ok, res.iterations, wall, digest, None))
    return records


def _unit(args):
    spec, trial, solvers, tol = args
    return spec.k, trial, run_trial(spec, trial, solvers, tol)


def run_experiment(config: BenchConfig) -> RecoveryCurve:
    base = config.spec
    units = []
    for k in config.k_values:
        spec = EnsembleSpec(m=base.m, n=base.n, k=k, trials=base.trials, seed=base.seed,
                            sign_mode=base.sign_mode)
        units.extend((spec, t, config.solvers, config.success_tol) for t in range(base.trials))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_unit, units, chunksize=4))
    else:
        outputs = [_unit(u) for u in units]

    curve = RecoveryCurve()
    # reduce in a fixed key order so the sums do not depend on scheduling
    for k, trial, records in sorted(outputs, key=lambda o: (o[0], o[1])):
        for label, ok, iters, wall, _, err in records:
            c = curve.cell(label, k)
            c.trials += 1
            c.successes += int(ok)
            c.failures += int(err is not None)
            c.iterations_total += iters
            c.wall_total += wall
    return curve


# -- traces ------------------------------------------------------------------

@dataclass
class TraceTable:
    estimates: np.ndarray
    rel_errors: Optional[np.ndarray]
    convention: str = "x = lambda_prev * u_next"

    @property
    def iterations(self) -> int:
        return self.estimates.shape[0]


def run_trace(problem: Problem, config: IroaConfig) -> TraceTable:
    if not config.record_trace:
        raise ValueError("run_trace needs config.record_trace=True")
    solve = iroa_solve_schedule if config.p_schedule else iroa_solve
    res = solve(problem, config)
    est = np.array(res.trace, dtype=float).reshape(len(res.trace), problem.n)
    errs = None
    if problem.ground_truth is not None:
        errs = np.array([relative_error(row, problem.ground_truth) for row in est])
    return TraceTable(est, errs, res.info.get("signal_convention", "x = lambda_prev * u_next"))


# -- export ------------------------------------------------------------------

def export_csv(curve: RecoveryCurve, path, timing=True) -> None:
    """Write one row per (solver, k), sorted by solver then k.

    With ``timing=False`` the wall-time column is left empty so that the file
    depends only on seed and configuration.
    """
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for solver, k in sorted(curve.cells):
                c = curve.cells[(solver, k)]
                w.writerow([
                    solver, k, c.trials, c.successes, f"{c.frequency:.6f}",
                    f"{c.mean_iterations:.6f}", f"{c.mean_wall_time:.6f}" if timing else "",
                ])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path) -> RecoveryCurve:
    curve = RecoveryCurve()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            c = curve.cell(row["solver"], int(row["k"]))
            c.trials = int(row["trials"])
            c.successes = int(row["successes"])
            c.iterations_total = float(row["mean_iterations"]) * c.trials
            wall = row["mean_wall_time_s"]
            c.wall_total = float(wall) * c.trials if wall else float("nan")
    return curve


def export_trace_csv(trace: TraceTable, path) -> None:
    n = trace.estimates.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "rel_error"] + [f"x{i}" for i in range(n)])
        for i, row in enumerate(trace.estimates):
            err = "" if trace.rel_errors is None else repr(float(trace.rel_errors[i]))
            w.writerow([i + 1, err] + [repr(float(v)) for v in row])


def export_svg(obj, path, title=None) -> None:
    if isinstance(obj, RecoveryCurve):
        if not obj.cells:
            raise ValueError("curve is empty")
        text = curve_svg(
            {s: list(zip(obj.k_values(s), obj.frequencies(s))) for s in obj.solvers()},
            title=title or "recovery frequency",
        )
    elif isinstance(obj, TraceTable):
        if obj.iterations == 0:
            raise ValueError("trace is empty")
        text = trace_svg(np.abs(obj.estimates), title=title or "signal magnitude per iteration")
    else:
        raise TypeError(f"cannot plot {type(obj).__name__}")
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc


def write_manifest(path, config: BenchConfig, curve: Optional[RecoveryCurve] = None, **extra) -> None:
    lines = [
        f"version: {__version__}",
        f"created_utc: {datetime.now(timezone.utc).isoformat(timespec='seconds')}",
        f"python: {platform.python_version()}",
        f"numpy: {np.__version__}",
        f"seed: {config.spec.seed}",
        f"m: {config.spec.m}",
        f"n: {config.spec.n}",
        f"trials: {config.spec.trials}",
        f"sign_mode: {config.spec.sign_mode}",
        f"k_values: {','.join(map(str, config.k_values))}",
        f"success_tol: {config.success_tol!r}",
        f"workers: {config.workers}",
    ]
    for s in config.solvers:
        lines.append(f"solver: {s.label} name={s.name} options={s.options!r}")
    for key, val in extra.items():
        lines.append(f"{key}: {val}")
    if curve is not None:
        for (solver, k), c in sorted(curve.cells.items()):
            lines.append(
                f"timing: {solver} k={k} mean_wall_time_s={c.mean_wall_time:.6f} failures={c.failures}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

