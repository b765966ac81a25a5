"""Tabulate m / (phi(m) loglog phi(m)) over primorial levels.

The ratio should drift toward exp(gamma) ~ 1.78107 as the level grows; the
table is for eyeballing the trend, nothing here is asserted.
"""

import argparse
import math
import sys

from primesum.ntheory import primorial
from primesum.zm_sumsets import mertens_ratio


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-level", type=int, default=31)
    args = parser.parse_args(argv)

    euler_gamma = 0.5772156649015329
    limit = math.exp(euler_gamma)
    print(f"{'W':>4} {'m':>14} {'phi(m)':>12} {'ratio':>10} {'ratio/e^gamma':>14}")
    w = 5
    while w <= args.max_level:
        mod = primorial(w)
        ratio = mertens_ratio(w)
        print(
            f"{w:>4} {mod.m:>14} {mod.totient:>12} {ratio:>10.5f} "
            f"{ratio / limit:>14.5f}"
        )
        w += 2
    print(f"\nexp(gamma) = {limit:.5f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
