"""Run the full sumset pipeline at desk scale and print its check table.

Example:
    python scripts/pipeline_demo.py --n 100000 --W 3 --rule residue-filter:1:6
"""

import argparse
import sys

from primesum.expcli.config import ExperimentConfig, parse_rule
from primesum.expcli.pipeline import run_pipeline


def fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100_000)
    parser.add_argument("--W", type=int, default=3)
    parser.add_argument("--rule", default="all-primes")
    parser.add_argument("--delta", type=float, default=1.0)
    parser.add_argument("--eps", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    cfg = ExperimentConfig(
        n=args.n,
        w=args.W,
        delta=args.delta,
        rule=parse_rule(args.rule),
        eps=args.eps,
        seed=args.seed,
    )
    report = run_pipeline(cfg)
    s = report.summary

    print(f"n={s['n']} W={s['w']} m={s['m']} N={s['N']} rule={args.rule}")
    print(
        f"subset {s['subset_count']} of {s['prime_count']} primes "
        f"(delta {fmt(s['delta'])}), good classes {s['good_classes']}"
    )
    print()
    width = max(len(c.name) for c in report.checks)
    for c in report.checks:
        status = "pass" if c.passed else ("FAIL" if c.passed is False else "info")
        print(
            f"  {c.name:<{width}}  [{c.kind:>6}]  {status:<4}  "
            f"{fmt(c.lhs)} {c.relation} {fmt(c.rhs)}"
        )
    print()
    print(
        f"lower bound {fmt(s['lower_bound'])}  actual sumset {fmt(s['actual_sumset'])}  "
        f"witnesses certified {fmt(s['witness_ok'])}"
    )
    if s["fitted_constant"] is not None:
        print(
            f"fitted constant {fmt(s['fitted_constant'])} "
            f"at exponent argument {fmt(s['exponent_argument'])}"
        )
    print(f"checks passed {s['checks_passed']}/{s['checks_total']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
