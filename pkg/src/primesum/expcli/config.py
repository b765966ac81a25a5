"""Experiment configuration objects and subset rules.

Configs are plain dataclasses validated once up front; every run is fully
determined by (config, seed).  Random draws use the counter-based Philox
generator keyed by (seed, trial index), so trials are independent of
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..ntheory import PrimeTable, primorial

__all__ = [
    "SubsetRule",
    "ExperimentConfig",
    "RandomSetExperiment",
    "parse_rule",
    "build_subset",
]

_MAX_N = 10_000_000
_MAX_PAIR_WORK = 1_000_000_000


@dataclass(frozen=True)
class SubsetRule:
    """How the prime subset is carved out of the primes up to n.

    Kinds: ``all-primes``; ``residue-filter`` keeps primes congruent to b0
    mod m0; ``random-thinning`` keeps a seeded-shuffle subset of size
    ceil(density * count).
    """

    kind: str
    b0: int | None = None
    m0: int | None = None

    def spec_string(self) -> str:
        if self.kind == "residue-filter":
            return f"residue-filter:{self.b0}:{self.m0}"
        return self.kind


def parse_rule(text: str) -> SubsetRule:
    parts = text.strip().split(":")
    kind = parts[0]
    if kind == "all-primes":
        if len(parts) != 1:
            raise ConfigurationError(f"all-primes takes no parameters, got {text!r}")
        return SubsetRule(kind="all-primes")
    if kind == "residue-filter":
        if len(parts) != 3:
            raise ConfigurationError(
                f"residue-filter needs b0 and m0, e.g. residue-filter:1:6, got {text!r}"
            )
        try:
            b0, m0 = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigurationError(f"bad residue-filter parameters in {text!r}") from exc
        if m0 < 2 or not 0 <= b0 < m0:
            raise ConfigurationError(
                f"residue-filter needs 0 <= b0 < m0 and m0 >= 2, got b0={b0}, m0={m0}"
            )
        return SubsetRule(kind="residue-filter", b0=b0, m0=m0)
    if kind == "random-thinning":
        if len(parts) != 1:
            raise ConfigurationError(
                f"random-thinning takes its density from --delta, got {text!r}"
            )
        return SubsetRule(kind="random-thinning")
    raise ConfigurationError(f"unknown subset rule {kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full configuration of a pipeline run."""

    n: int
    w: int
    delta: float = 1.0
    rule: SubsetRule = field(default_factory=lambda: SubsetRule(kind="all-primes"))
    eps: float = 0.1
    eps0: float | None = None
    sigma: float | None = None
    k: int | None = None
    seed: int = 0
    output_format: str = "json"

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 100:
            raise ConfigurationError(f"need integer n >= 100, got {self.n}")
        if self.n > _MAX_N:
            raise ConfigurationError(f"n = {self.n} exceeds the desk-scale cap {_MAX_N}")
        if not isinstance(self.w, int) or self.w < 2:
            raise ConfigurationError(f"need integer w >= 2, got {self.w}")
        if not 0 < self.delta <= 1:
            raise ConfigurationError(f"delta must lie in (0, 1], got {self.delta}")
        if not 0 < self.eps < 1:
            raise ConfigurationError(f"eps must lie in (0, 1), got {self.eps}")
        if self.eps0 is not None and not 0 < self.eps0 <= 1:
            raise ConfigurationError(f"eps0 must lie in (0, 1], got {self.eps0}")
        if self.sigma is not None and not self.sigma > 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if self.k is not None and self.k < 2:
            raise ConfigurationError(f"k must be >= 2, got {self.k}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be nonnegative, got {self.seed}")
        if self.output_format not in ("csv", "json"):
            raise ConfigurationError(f"unknown output format {self.output_format!r}")
        mod = primorial(self.w)
        if 4 * self.n < 2 * mod.m:
            raise ConfigurationError(
                f"primorial {mod.m} too large for n = {self.n}; lower w"
            )
        big_n = (4 * self.n) // mod.m
        if mod.totient**2 * big_n > _MAX_PAIR_WORK:
            raise ConfigurationError(
                f"pairwise workload phi^2 N = {mod.totient ** 2 * big_n} exceeds "
                f"{_MAX_PAIR_WORK}; lower w or n"
            )

    def resolved_sigma(self) -> float:
        return self.sigma if self.sigma is not None else self.eps / 20.0

    def resolved_eps0(self, measured_delta: float) -> float:
        if self.eps0 is not None:
            return self.eps0
        sigma = self.resolved_sigma()
        if measured_delta > 0:
            return max(min(sigma**6 * measured_delta**4 / 400.0, 0.01), 1e-30)
        return 0.01

    def echo(self) -> dict:
        return {
            "n": self.n,
            "w": self.w,
            "delta": self.delta,
            "rule": self.rule.spec_string(),
            "eps": self.eps,
            "eps0": self.eps0,
            "sigma": self.sigma,
            "k": self.k,
            "seed": self.seed,
            "output_format": self.output_format,
        }


def build_subset(cfg: ExperimentConfig, table: PrimeTable) -> np.ndarray:
    """Materialize the configured prime subset from a sieve table."""
    primes = table.primes
    rule = cfg.rule
    if rule.kind == "all-primes":
        return primes.copy()
    if rule.kind == "residue-filter":
        return primes[primes % rule.m0 == rule.b0]
    if rule.kind == "random-thinning":
        size = math.ceil(cfg.delta * primes.size)
        rng = np.random.Generator(
            np.random.Philox(key=np.array([cfg.seed, 0], dtype=np.uint64))
        )
        chosen = rng.permutation(primes)[:size]
        return np.sort(chosen)
    raise ConfigurationError(f"unknown subset rule {rule.kind!r}")


@dataclass(frozen=True)
class RandomSetExperiment:
    """Random host-and-subset trials on Z_N.

    ``theta`` and ``beta`` are regime annotations echoed into the report;
    each trial draws a host S by independent inclusion with probability p,
    then a uniform subset of size ceil(alpha |S|) by seeded shuffle.
    """

    N: int
    p: float
    alpha: float
    trials: int
    seed: int = 0
    theta: float | None = None
    beta: float | None = None

    def validate(self) -> None:
        if not isinstance(self.N, int) or self.N < 1:
            raise ConfigurationError(f"need integer N >= 1, got {self.N}")
        if self.N > 1_000_000:
            raise ConfigurationError(f"N = {self.N} exceeds the desk-scale cap 1000000")
        if not 0 < self.p <= 1:
            raise ConfigurationError(f"p must lie in (0, 1], got {self.p}")
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 1 <= self.trials <= 10_000:
            raise ConfigurationError(
                f"trials must lie in [1, 10000], got {self.trials}"
            )
        if self.seed < 0:
            raise ConfigurationError(f"seed must be nonnegative, got {self.seed}")

    def echo(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "alpha": self.alpha,
            "beta": self.beta,
            "theta": self.theta,
            "trials": self.trials,
            "seed": self.seed,
        }
