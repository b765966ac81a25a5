"""Sweep subset density over a random host and record sumset coverage.

For each alpha on a grid, draws random hosts in Z_N by independent
inclusion, keeps a random alpha-fraction, and reports the fraction of Z_N
covered by the sumset.  Coverage saturating at modest alpha is the expected
picture for unstructured sets.
"""

import argparse
import sys

import numpy as np

from primesum.expcli.config import RandomSetExperiment
from primesum.expcli.pipeline import simulate_random_host


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--N", type=int, default=4096)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--alpha-steps", type=int, default=12)
    args = parser.parse_args(argv)

    print(f"N={args.N} host density p={args.p} trials={args.trials}")
    print(f"{'alpha':>8} {'mean':>8} {'min':>8} {'max':>8} {'skipped':>8}")
    for alpha in np.linspace(0.05, 1.0, args.alpha_steps):
        exp = RandomSetExperiment(
            N=args.N,
            p=args.p,
            alpha=float(alpha),
            trials=args.trials,
            seed=args.seed,
        )
        s = simulate_random_host(exp).summary
        mean = s["mean_fraction"]
        print(
            f"{alpha:>8.3f} "
            f"{mean if mean is not None else float('nan'):>8.4f} "
            f"{s['min_fraction'] if s['min_fraction'] is not None else float('nan'):>8.4f} "
            f"{s['max_fraction'] if s['max_fraction'] is not None else float('nan'):>8.4f} "
            f"{s['skipped']:>8}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
