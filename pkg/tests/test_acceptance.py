"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
Criterion 1 runs the full 100-trial sweep and takes several minutes on one core.
"""
import csv
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import sparse_iroa.iroa as iroa_mod
from sparse_iroa.baselines import IhtConfig, IrlsConfig, brute_force_sparsest, iht_solve, irls_solve, ista_solve
from sparse_iroa.bench import BenchConfig, SolverSpec, export_csv, run_experiment
from sparse_iroa.ensemble import EnsembleSpec, make_problem
from sparse_iroa.iroa import IroaConfig, iroa_solve, iroa_solve_schedule, signed_power
from sparse_iroa.model import Problem, relative_error
from sparse_iroa.ridge import ridge_dual, ridge_primal

DATA = Path(__file__).parent / "data"

# frozen from the first full sweep (seed 2026); see tests/data/recovery_seed2026.csv
SWEEP_SEED = 2026
SWEEP_BASELINE = DATA / "recovery_seed2026.csv"
BASELINE_SLACK = 0.03

# frozen seeded 9-sparse instance: measured 15 iterations, relative error 1.18e-6
FOCUS_SEED = 2026
FOCUS_ITERATIONS = 15

# p = 1 failure edge on m=25, n=100 non-negative signals: 23/50 single-stage, 46/50 scheduled
EDGE_K, EDGE_SEED, EDGE_TRIALS = 6, 8, 50


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def _baseline_iroa():
    with open(SWEEP_BASELINE, newline="") as fh:
        return {int(r["k"]): int(r["successes"]) for r in csv.DictReader(fh) if r["solver"] == "iroa"}


def test_criterion_1_recovery_ordering(tmp_path, report):
    ks = list(range(2, 31, 2))
    config = BenchConfig(
        EnsembleSpec(m=50, n=200, trials=100, seed=SWEEP_SEED),
        ks,
        [SolverSpec("iroa", {"p": 2}), SolverSpec("iht"), SolverSpec("irls", {"p_norm": 1.0}), SolverSpec("ista")],
    )
    t0 = time.perf_counter()
    curve = run_experiment(config)
    elapsed = time.perf_counter() - t0
    export_csv(curve, tmp_path / "recovery.csv", timing=False)

    iroa, iht = np.array(curve.frequencies("iroa")), np.array(curve.frequencies("iht"))
    ordering = bool(np.all(iroa >= iht - 0.10))
    strict = int(np.sum(iroa > iht))
    smooth_ok = {}
    for s in curve.solvers():
        f = np.array(curve.frequencies(s))
        pairs = (f[:-1] + f[1:]) / 2
        smooth_ok[s] = bool(np.all(np.diff(pairs) <= 0))
    k2 = curve.cells[("iroa", 2)].successes
    base = _baseline_iroa()
    drift = max(abs(curve.cells[("iroa", k)].successes - base[k]) / 100 for k in ks)

    ok = ordering and strict >= 3 and all(smooth_ok.values()) and k2 == 100 and drift <= BASELINE_SLACK
    detail = (
        f"(a) iroa>=iht-0.10 everywhere={ordering}, strictly greater at {strict} k; "
        f"(b) smoothed monotone={smooth_ok}; (c) iroa k=2 {k2}/100; "
        f"baseline drift {drift:.2f}; {elapsed:.0f}s"
    )
    report(1, ok, detail)


def test_criterion_2_focusing_instance(report):
    prob = make_problem(EnsembleSpec(m=50, n=200, k=9, trials=1, seed=FOCUS_SEED), 0)
    res = iroa_solve(prob, IroaConfig(p=2))
    err = relative_error(res.x_hat, prob.ground_truth)
    ok = res.converged and err < 1e-3 and res.iterations <= 30 and res.iterations == FOCUS_ITERATIONS
    report(2, ok, f"relative error {err:.2e}, {res.iterations} iterations (frozen {FOCUS_ITERATIONS}, cap 30)")


def test_criterion_3_oracle_equivalence(report):
    certified = gated = violations = agree = 0
    for seed in range(100):
        k = 1 + seed % 3
        prob = make_problem(EnsembleSpec(m=12, n=24, k=k, trials=1, seed=seed), 0)
        oracle = brute_force_sparsest(prob, k)
        if not (oracle.found and oracle.unique and oracle.size == k):
            continue
        certified += 1
        res = iroa_solve(prob)
        top = tuple(sorted(np.argsort(-np.abs(res.x_hat), kind="stable")[:k].tolist()))
        agree += top == oracle.support
        if res.residual_norm < 1e-6 * np.linalg.norm(prob.b):
            gated += 1
            violations += top != oracle.support
    # the residual gate is what the criterion conditions on; the ridge term leaves
    # a 1e-6..1e-4 relative bias, so many certified instances sit just above it
    detail = (f"{gated} of {certified} certified instances pass the residual gate, {violations} violations; "
              f"support agreement on all certified instances {agree}/{certified}")
    report(3, violations == 0 and gated > 0, detail)


def test_criterion_4_kernel_equivalence(report):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 21))
        s = int(rng.integers(1, 2 * m + 1))
        a = rng.standard_normal((m, s))
        b = rng.standard_normal(m)
        mu = 10 ** rng.uniform(-9, 1)
        p, d = ridge_primal(a, b, mu), ridge_dual(a, b, mu)
        scale = max(np.linalg.norm(p), np.finfo(float).tiny)
        worst = max(worst, np.linalg.norm(p - d) / scale)
    report(4, worst <= 1e-8, f"worst primal/dual relative gap {worst:.2e} over 1000 inputs (tol 1e-8)")


def test_criterion_5_pruning_soundness(report):
    worst = 0.0
    monotone = True
    runs = 0
    for seed in range(30):
        prob = make_problem(EnsembleSpec(m=30, n=90, k=2 + seed % 8, trials=1, seed=seed), 0)
        for p in (1, 2, 3):
            cfg = IroaConfig(p=p, prune_tau=0.0)
            a = iroa_solve(prob, cfg)
            original = iroa_mod.prune
            iroa_mod.prune = lambda state, tau: state
            try:
                b = iroa_solve(prob, cfg)
            finally:
                iroa_mod.prune = original
            worst = max(worst, float(np.abs(a.x_hat - b.x_hat).max()))
            for tau in (0.0, 1e-4, 1e-2):
                sets = []
                iroa_solve(prob, IroaConfig(p=p, prune_tau=tau), callback=lambda s: sets.append(set(s.active.tolist())))
                monotone &= all(after <= before for before, after in zip(sets, sets[1:]))
                runs += 1
    ok = worst <= 1e-12 and monotone
    report(5, ok, f"tau=0 vs prune-free max gap {worst:.1e}; active sets monotone in {runs} logged runs: {monotone}")


def test_criterion_6_algebraic_invariants(report):
    fails = []
    eps = 1e-3
    for seed in range(20):
        prob = make_problem(EnsembleSpec(m=20, n=60, k=2 + seed % 5, trials=1, seed=seed), 0)
        nb = np.linalg.norm(prob.b)
        for p in (2, 4):
            a = iroa_solve(prob, IroaConfig(p=p)).x_hat
            b = iroa_solve(Problem(prob.phi, -prob.b), IroaConfig(p=p)).x_hat
            if np.linalg.norm(a + b) > 1e-10 * np.linalg.norm(a):
                fails.append(f"sign p={p} seed={seed}")
        res = iroa_solve(prob, IroaConfig(p=2, prune_tau=0.0, epsilon=eps))
        if res.converged and np.linalg.norm(res.x_hat - signed_power(res.u_final, 3)) > 3 * eps / 100 * np.linalg.norm(res.x_hat):
            fails.append(f"fixed point seed={seed}")
        k = 2 + seed % 5
        if any(np.count_nonzero(x) > k for x in iht_solve(prob, IhtConfig(k, max_iters=100), record_trace=True).trace):
            fails.append(f"iht sparsity seed={seed}")
        for u in irls_solve(prob, IrlsConfig(max_iters=60), record_trace=True).trace:
            if np.linalg.norm(prob.phi @ u - prob.b) > 1e-8 * nb:
                fails.append(f"irls residual seed={seed}")
                break
        hist = ista_solve(prob, 1e-2, max_iters=2000, tol=1e-14).info["objective"]
        if np.any(np.diff(hist) > 1e-12 * np.maximum(hist[:-1], 1.0)):
            fails.append(f"ista objective seed={seed}")
    report(6, not fails, "sign equivariance, fixed point, IHT sparsity, IRLS constraint, ISTA descent over 20 instances"
           + (f"; failures: {fails}" if fails else ""))


def test_criterion_7_determinism(tmp_path, report):
    solvers = [SolverSpec("iroa"), SolverSpec("iht"), SolverSpec("irls"), SolverSpec("ista", {"max_iters": 2000})]
    spec = EnsembleSpec(m=30, n=90, trials=6, seed=77)
    outputs = {}
    for workers in (1, 2):
        config = BenchConfig(spec, [3, 9, 15], solvers, workers=workers)
        for run in ("a", "b"):
            path = tmp_path / f"w{workers}{run}.csv"
            export_csv(run_experiment(config), path, timing=False)
            outputs[workers, run] = path.read_bytes()
    repeat = outputs[1, "a"] == outputs[1, "b"] and outputs[2, "a"] == outputs[2, "b"]
    across = outputs[1, "a"] == outputs[2, "a"]
    report(7, repeat and across, f"consecutive runs byte-identical={repeat}; sequential vs 2 workers identical={across}")


def test_criterion_8_schedule_vs_single_stage(report):
    spec = EnsembleSpec(m=25, n=100, k=EDGE_K, trials=EDGE_TRIALS, seed=EDGE_SEED, sign_mode="nonneg")
    single = scheduled = 0
    for t in range(EDGE_TRIALS):
        prob = make_problem(spec, t)
        single += relative_error(iroa_solve(prob, IroaConfig(p=1)).x_hat, prob.ground_truth) < 1e-3
        sched = iroa_solve_schedule(prob, IroaConfig(p_schedule=[1, 2, 3])).x_hat
        scheduled += relative_error(sched, prob.ground_truth) < 1e-3
    report(8, scheduled >= single, f"K={EDGE_K}: schedule [1,2,3] {scheduled}/{EDGE_TRIALS} vs p=1 {single}/{EDGE_TRIALS}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
