"""Compare the literal update (u taken straight from the ridge solve) with the rebalanced one.

For each K, runs both modes on the same seeded problems and prints success
counts and the median final relative error.
"""
import argparse

import numpy as np

from sparse_iroa.ensemble import EnsembleSpec, make_problem
from sparse_iroa.iroa import IroaConfig, iroa_solve
from sparse_iroa.model import relative_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--k-list", default="3,6,9,12")
    args = ap.parse_args()

    modes = {
        "literal": IroaConfig(p=args.p, rebalance=False, smoothing=False),
        "rebalanced": IroaConfig(p=args.p),
    }
    print(f"{'K':>3} " + " ".join(f"{name:>24}" for name in modes))
    for k in (int(v) for v in args.k_list.split(",")):
        spec = EnsembleSpec(k=k, trials=args.trials, seed=args.seed)
        cells = []
        for cfg in modes.values():
            errs = []
            for t in range(args.trials):
                prob = make_problem(spec, t)
                errs.append(relative_error(iroa_solve(prob, cfg).x_hat, prob.ground_truth))
            errs = np.array(errs)
            cells.append(f"{int(np.sum(errs < 1e-3)):3d}/{args.trials} med {np.median(errs):.1e}")
        print(f"{k:>3} " + " ".join(f"{c:>24}" for c in cells))


if __name__ == "__main__":
    main()
