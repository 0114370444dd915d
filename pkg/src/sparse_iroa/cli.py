"""Command-line entry point: solve, bench, trace, oracle and gen.

Exit codes: 0 success, 1 usage or parse error, 2 solver stopped at its
iteration cap, 3 oracle found no sparse solution.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .baselines import IhtConfig, IrlsConfig, brute_force_sparsest, iht_solve, irls_solve, ista_solve
from .bench import (
    ISTA_DEFAULTS,
    BenchConfig,
    SolverSpec,
    export_csv,
    export_svg,
    export_trace_csv,
    run_experiment,
    run_trace,
    write_manifest,
)
from .ensemble import SIGN_MODES, EnsembleSpec, make_problem
from .iroa import IroaConfig, iroa_solve, iroa_solve_schedule
from .model import ProblemFormatError, load_problem, save_problem

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_NOT_FOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"not a comma-separated integer list: {text!r}") from None
    if not vals:
        raise UsageError("empty list")
    return vals


def _iroa_options(args):
    opts = {}
    for key, attr in (("p", "p"), ("mu", "mu"), ("epsilon", "epsilon"), ("prune_tau", "tau")):
        val = getattr(args, attr, None)
        if val is not None:
            opts[key] = val
    return opts


def _load(path):
    try:
        return load_problem(path)
    except ProblemFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def cmd_solve(args):
    problem = _load(args.problem)
    solver = args.solver
    if solver == "iht" and args.k is None:
        raise UsageError("iht requires --k")
    if args.schedule and solver != "iroa":
        raise UsageError("--schedule applies only to --solver iroa")
    if solver == "iroa":
        opts = _iroa_options(args)
        if args.schedule:
            cfg = IroaConfig(p_schedule=_int_list(args.schedule), **opts)
            res = iroa_solve_schedule(problem, cfg)
        else:
            res = iroa_solve(problem, IroaConfig(**opts))
    elif solver == "iht":
        res = iht_solve(problem, IhtConfig(sparsity_k=args.k))
    elif solver == "irls":
        res = irls_solve(problem, IrlsConfig())
    else:
        mu = args.mu if args.mu is not None else ISTA_DEFAULTS["mu"]
        res = ista_solve(problem, mu, ISTA_DEFAULTS["max_iters"], ISTA_DEFAULTS["tol"])

    x = res.x_hat
    peak = np.abs(x).max() if x.size else 0.0
    support = np.flatnonzero(np.abs(x) > 1e-6 * peak) if peak > 0 else np.array([], dtype=int)
    print(f"solver: {solver}")
    print(f"iterations: {res.iterations}")
    print(f"converged: {res.converged}")
    print(f"residual: {res.residual_norm:.6e}")
    print(f"support ({support.size}): {' '.join(map(str, support))}")
    print("values: " + " ".join(f"{x[i]:.6g}" for i in support))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(repr(float(v)) for v in x) + "\n")
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _solver_specs(names, p):
    specs = []
    for name in names:
        opts = {"p": p} if name == "iroa" else {}
        try:
            specs.append(SolverSpec(name, opts))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return specs


def cmd_bench(args):
    ks = _int_list(args.k_list)
    names = [s.strip() for s in args.solvers.split(",") if s.strip()]
    try:
        spec = EnsembleSpec(m=args.m, n=args.n, k=1, trials=args.trials, seed=args.seed,
                            sign_mode=args.sign_mode)
        config = BenchConfig(spec, ks, _solver_specs(names, args.p), success_tol=args.tol,
                             workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    curve = run_experiment(config)
    export_csv(curve, args.csv, timing=args.timing)
    write_manifest(args.csv + ".manifest.txt", config, curve, csv=args.csv, svg=args.svg or "")
    if args.svg:
        export_svg(curve, args.svg)
    print(curve.table())
    return EXIT_OK


def cmd_trace(args):
    if args.problem:
        problem = _load(args.problem)
    else:
        try:
            spec = EnsembleSpec(m=args.m, n=args.n, k=args.k, trials=1, seed=args.seed,
                                sign_mode=args.sign_mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        problem = make_problem(spec, 0)
    cfg = IroaConfig(record_trace=True, **_iroa_options(args))
    trace = run_trace(problem, cfg)
    print(f"# signal convention: {trace.convention}")
    print("iteration  rel_error      nnz")
    for i, row in enumerate(trace.estimates):
        err = "-" if trace.rel_errors is None else f"{trace.rel_errors[i]:.3e}"
        peak = np.abs(row).max()
        nnz = int(np.count_nonzero(np.abs(row) > 1e-8 * peak)) if peak > 0 else 0
        print(f"{i + 1:9d}  {err:>9}  {nnz:7d}")
    if args.csv:
        export_trace_csv(trace, args.csv)
    if args.svg:
        export_svg(trace, args.svg)
    return EXIT_OK


def cmd_oracle(args):
    problem = _load(args.problem)
    if problem.n > 32 or not 1 <= args.k_max <= 4:
        raise UsageError(f"oracle limited to N <= 32 and 1 <= k_max <= 4 (N={problem.n}, k_max={args.k_max})")
    res = brute_force_sparsest(problem, args.k_max)
    if not res.found:
        print(f"no solution with at most {args.k_max} nonzeros")
        return EXIT_NOT_FOUND
    print(f"size: {res.size}")
    print(f"unique: {res.unique}")
    print(f"support: {' '.join(map(str, res.support))}")
    print("values: " + " ".join(repr(float(res.signal[i])) for i in res.support))
    return EXIT_OK


def cmd_gen(args):
    try:
        spec = EnsembleSpec(m=args.m, n=args.n, k=args.k, trials=args.trial + 1, seed=args.seed,
                            sign_mode=args.sign_mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    save_problem(make_problem(spec, args.trial), args.out)
    return EXIT_OK


def _add_iroa_flags(p):
    p.add_argument("--p", type=int, default=None, help="reweight exponent (IROA)")
    p.add_argument("--mu", type=float, default=None, help="ridge weight (IROA) or l1 weight (ISTA)")
    p.add_argument("--epsilon", type=float, default=None, help="stopping parameter; threshold is epsilon/100")
    p.add_argument("--tau", type=float, default=None, help="relative pruning threshold, 0 disables")


def _add_gen_flags(p, k_default):
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--k", type=int, default=k_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sign-mode", choices=SIGN_MODES, default="gaussian")


def build_parser():
    parser = _Parser(prog="sparse-iroa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="recover a signal from a problem file")
    p.add_argument("problem")
    p.add_argument("--solver", choices=["iroa", "iht", "irls", "ista"], default="iroa")
    _add_iroa_flags(p)
    p.add_argument("--k", type=int, default=None, help="target sparsity (IHT)")
    p.add_argument("--schedule", default=None, help="comma-separated nondecreasing p values")
    p.add_argument("--out", default=None, help="write x_hat, one value per line")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="recovery frequency versus sparsity")
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-list", default=",".join(str(k) for k in range(2, 31, 2)))
    p.add_argument("--solvers", default="iroa,iht,irls,ista")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-3, help="relative error counted as recovery")
    p.add_argument("--csv", default="recovery.csv")
    p.add_argument("--svg", default=None)
    p.add_argument("--sign-mode", choices=SIGN_MODES, default="gaussian")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="write wall times into the CSV (breaks byte reproducibility)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("trace", help="per-iteration IROA estimates")
    p.add_argument("problem", nargs="?", default=None)
    _add_gen_flags(p, k_default=9)
    _add_iroa_flags(p)
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("oracle", help="exhaustive sparsest solution (small N)")
    p.add_argument("problem")
    p.add_argument("--k-max", type=int, default=3)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write an ensemble problem in the text format")
    _add_gen_flags(p, k_default=9)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
