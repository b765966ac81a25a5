"""Residue-class partitions of prime subsets and their weighted embeddings
into Z_N.

A subset A of the primes up to n is split along the reduced residue classes
of a primorial modulus m.  Each class embeds into Z_N (N about 4n/m) through
x -> (prime - b) / m, carrying a log-weighted density normalized so that the
all-class weight has average close to 1.  The embedded densities feed the
spectral machinery from `zn_spectral`; everything asymptotic (weight mass,
spectral flatness, support fractions) is reported with explicit pass flags
rather than asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvariantViolation
from .ntheory import FactoredModulus, PrimeTable, primorial, sieve_primes
from .zn_spectral import (
    DensityFunction,
    convolution_proof_quantities,
    dft,
    green_decompose,
    positive_support,
)

__all__ = [
    "ResiduePartition",
    "EmbeddedClass",
    "MassCheck",
    "PseudorandomDeficit",
    "PairSumsetReport",
    "DeltaAggregate",
    "partition_and_densities",
    "good_set",
    "choose_N",
    "embed_class",
    "embedding_mass_check",
    "pseudorandom_deficit",
    "pair_sumset_report",
    "aggregate_delta",
]


@dataclass(frozen=True)
class ResiduePartition:
    """A prime subset split along the reduced residues of a primorial.

    ``classes`` maps each unit b to the pair (members of A in the class,
    all primes in the class); primes dividing the modulus sit in the
    residual arrays so that totals reconcile exactly.
    """

    n: int
    w: int
    modulus: FactoredModulus
    classes: dict[int, tuple[np.ndarray, np.ndarray]]
    delta_b: dict[int, float]
    delta: float
    good: frozenset[int]
    residual_primes: np.ndarray
    residual_a: np.ndarray

    @property
    def units(self) -> list[int]:
        return sorted(self.classes)


@dataclass(frozen=True)
class EmbeddedClass:
    """One residue class mapped into Z_N with its log-weighted densities.

    ``lam`` stores the pointwise weight (phi(m) / (m N)) log(m x + b) on the
    positions x in [1, N] with m x + b prime (position N wraps to 0); ``nu``
    is N times that, and ``f`` is ``nu`` restricted to the positions coming
    from A.
    """

    b: int
    N: int
    indicator: frozenset[int]
    lam: DensityFunction
    nu: DensityFunction
    f: DensityFunction
    delta_b: float
    w: int
    n: int
    modulus: FactoredModulus


def partition_and_densities(a_members, n: int, w: int) -> ResiduePartition:
    """Split A (a set of primes <= n) along the reduced residues mod the
    primorial of w, with per-class and global densities.

    A class with no primes at all gets density 0 by convention.  The good
    set collects classes at least half as dense as A itself.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    table = sieve_primes(n)
    a_arr = np.unique(np.asarray(list(a_members), dtype=np.int64))
    if a_arr.size and np.setdiff1d(a_arr, table.primes).size:
        raise DomainError("members must all be primes <= n")
    mod = primorial(w)
    m = mod.m

    unit_list = [int(x) for x in np.flatnonzero(np.gcd(np.arange(m), m) == 1)]
    divisor_set = np.asarray(mod.prime_divisors, dtype=np.int64)
    residual_primes = table.primes[np.isin(table.primes, divisor_set)]
    residual_a = a_arr[np.isin(a_arr, divisor_set)]

    def split_by_residue(arr: np.ndarray) -> dict[int, np.ndarray]:
        res = arr % m
        order = np.argsort(res, kind="stable")
        sorted_res = res[order]
        out = {}
        for b in unit_list:
            lo = int(np.searchsorted(sorted_res, b, side="left"))
            hi = int(np.searchsorted(sorted_res, b, side="right"))
            out[b] = arr[order[lo:hi]]
        return out

    p_split = split_by_residue(table.primes)
    a_split = split_by_residue(a_arr)
    classes = {b: (a_split[b], p_split[b]) for b in unit_list}

    covered = sum(v.size for v in p_split.values()) + residual_primes.size
    if covered != table.primes.size:
        raise InvariantViolation("residue classes fail to cover the primes")

    delta_b = {
        b: (a_split[b].size / p_split[b].size) if p_split[b].size else 0.0
        for b in unit_list
    }
    delta = a_arr.size / table.primes.size
    # An empty subset has no good classes; the >= delta/2 rule would
    # otherwise admit every class vacuously.
    if delta == 0.0:
        good = frozenset()
    else:
        good = frozenset(b for b in unit_list if delta_b[b] >= delta / 2)
    return ResiduePartition(
        n=n,
        w=w,
        modulus=mod,
        classes=classes,
        delta_b=delta_b,
        delta=delta,
        good=good,
        residual_primes=residual_primes,
        residual_a=residual_a,
    )


def good_set(part: ResiduePartition, threshold: float) -> frozenset[int]:
    """Classes whose density reaches ``threshold`` (0 keeps every class)."""
    if not 0 <= threshold <= 1:
        raise DomainError(f"threshold must lie in [0, 1], got {threshold}")
    return frozenset(b for b in part.classes if part.delta_b[b] >= threshold)


def choose_N(n: int, m: int) -> int:
    """Embedding length floor(4n/m), which always lands in (2n/m, 4n/m]."""
    if n < 1 or m < 1:
        raise DomainError(f"need positive n and m, got n={n}, m={m}")
    if 4 * n < 2 * m:
        raise DomainError(
            f"modulus {m} too large for n={n}: the embedding would be empty"
        )
    big_n = (4 * n) // m
    if not (big_n * m > 2 * n and big_n * m <= 4 * n):
        raise InvariantViolation(f"embedding length {big_n} fell outside its window")
    return big_n


def embed_class(
    part: ResiduePartition,
    b: int,
    big_n: int,
    table: PrimeTable | None = None,
) -> EmbeddedClass:
    """Map the class of b into Z_N with its log weight.

    Positions x run over 1..N (x = N wraps to residue 0); the weight needs
    primality of m x + b up to m N + b, so a table at least that large is
    sieved here unless one is supplied.
    """
    if b not in part.classes:
        raise DomainError(f"{b} is not a reduced residue of {part.modulus.m}")
    if big_n < 1:
        raise DomainError(f"need N >= 1, got {big_n}")
    m = part.modulus.m
    phi = part.modulus.totient
    hi = m * big_n + b
    if table is None:
        table = sieve_primes(hi)
    elif table.limit < hi:
        raise DomainError(f"prime table reaches {table.limit}, need {hi}")

    primes = table.primes
    lo_idx = int(np.searchsorted(primes, m + b))
    hi_idx = int(np.searchsorted(primes, hi, side="right"))
    in_class = primes[lo_idx:hi_idx]
    in_class = in_class[in_class % m == b]
    xs = (in_class - b) // m
    positions = np.where(xs == big_n, 0, xs)

    lam_vals = np.zeros(big_n, dtype=np.float64)
    lam_vals[positions] = (phi / (m * big_n)) * np.log(in_class.astype(np.float64))

    a_class = part.classes[b][0]
    a_eligible = a_class[a_class >= m + b]
    a_xs = (a_eligible - b) // m
    if a_xs.size and int(a_xs.max()) > big_n:
        raise InvariantViolation("subset member escaped the embedding window")
    a_positions = np.where(a_xs == big_n, 0, a_xs)
    f_vals = np.zeros(big_n, dtype=np.float64)
    f_vals[a_positions] = big_n * lam_vals[a_positions]

    nu_vals = big_n * lam_vals
    return EmbeddedClass(
        b=b,
        N=big_n,
        indicator=frozenset(int(x) for x in a_xs),
        lam=DensityFunction(N=big_n, values=lam_vals),
        nu=DensityFunction(N=big_n, values=nu_vals),
        f=DensityFunction(N=big_n, values=f_vals),
        delta_b=part.delta_b[b],
        w=part.w,
        n=part.n,
        modulus=part.modulus,
    )


@dataclass(frozen=True)
class MassCheck:
    """Compensated weight mass over the embedded subset against the
    one-sixteenth density floor."""

    b: int
    mass: float
    threshold: float
    passed: bool


def embedding_mass_check(ec: EmbeddedClass, delta_b: float | None = None) -> MassCheck:
    """Sum the weight over the embedded subset (compensated summation) and
    compare with delta_b / 16.  Reported, never asserted."""
    d = ec.delta_b if delta_b is None else float(delta_b)
    mass = math.fsum(float(v) for v in ec.f.values) / ec.N
    threshold = d / 16.0
    return MassCheck(b=ec.b, mass=mass, threshold=threshold, passed=mass >= threshold)


@dataclass(frozen=True)
class PseudorandomDeficit:
    """Spectral flatness of the all-class weight: distance of the zero mode
    from 1 and the largest off-zero coefficient, with the asymptotic
    reference 2 loglog w / w alongside."""

    b: int
    zero_mode_error: float
    offpeak_sup: float
    reference_bound: float


def pseudorandom_deficit(ec: EmbeddedClass) -> PseudorandomDeficit:
    coeffs = dft(ec.nu).coeffs
    zero_err = float(abs(coeffs[0] - 1.0))
    offpeak = float(np.max(np.abs(coeffs[1:]))) if ec.N > 1 else 0.0
    w = ec.w
    reference = 2.0 * math.log(math.log(w)) / w if w >= 3 else math.nan
    return PseudorandomDeficit(
        b=ec.b,
        zero_mode_error=zero_err,
        offpeak_sup=offpeak,
        reference_bound=reference,
    )


@dataclass(frozen=True)
class PairSumsetReport:
    """Support and convolution bookkeeping for one pair of embedded classes.

    ``support_fraction`` is the positive support of f * g over N; the target
    is the mean class density minus eps.  The threshold counts follow the
    positivity argument: smoothed main term against sigma alpha N, mixed
    pieces against a tenth of that, where alpha is the smaller mean.
    """

    b1: int
    b2: int
    N: int
    eps: float
    sigma: float
    eps0_requested: float
    eps0_used: float
    alpha: float
    beta: float
    support_count: int
    support_fraction: float
    target_fraction: float
    passed: bool
    main_count: int
    main_fraction: float
    main_target: float
    main_passed: bool
    error_counts: dict[str, int]
    error_count_reference: float
    error_l2sq: dict[str, float]
    f1_max: float
    g1_max: float
    bohr_size_f: int
    bohr_size_g: int


def pair_sumset_report(
    ec1: EmbeddedClass,
    ec2: EmbeddedClass,
    eps: float,
    eps0: float,
    sigma: float,
) -> PairSumsetReport:
    """Decompose both class densities, convolve the pieces, and report the
    support of f * g against the density target.

    The spectral threshold is clamped down to sigma^6 alpha^4 / 400 whenever
    the requested value violates that relation (alpha the smaller mean).
    Zero densities short-circuit to an empty-support report.
    """
    if ec1.N != ec2.N:
        raise DomainError(f"mismatched embedding lengths {ec1.N} and {ec2.N}")
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not eps0 > 0:
        raise DomainError(f"eps0 must be positive, got {eps0}")
    n = ec1.N
    f, g = ec1.f, ec2.f
    mean_f, mean_g = f.mean(), g.mean()
    alpha = min(mean_f, mean_g)
    beta = max(mean_f, mean_g)
    target = (ec1.delta_b + ec2.delta_b) / 2.0 - eps

    if alpha == 0.0:
        return PairSumsetReport(
            b1=ec1.b,
            b2=ec2.b,
            N=n,
            eps=eps,
            sigma=sigma,
            eps0_requested=eps0,
            eps0_used=eps0,
            alpha=alpha,
            beta=beta,
            support_count=0,
            support_fraction=0.0,
            target_fraction=target,
            passed=0.0 >= target,
            main_count=0,
            main_fraction=0.0,
            main_target=(mean_f + mean_g) / 2.0 - 3.0 * sigma,
            main_passed=0.0 >= (mean_f + mean_g) / 2.0 - 3.0 * sigma,
            error_counts={"12": 0, "21": 0, "22": 0},
            error_count_reference=sigma * n,
            error_l2sq={"12": 0.0, "21": 0.0, "22": 0.0},
            f1_max=0.0,
            g1_max=0.0,
            bohr_size_f=0,
            bohr_size_g=0,
        )

    cap = sigma**6 * alpha**4 / 400.0
    eps0_used = min(eps0, cap) if cap > 0 else eps0
    decomp_f = green_decompose(f, eps0_used, sigma)
    decomp_g = green_decompose(g, eps0_used, sigma)
    quantities = convolution_proof_quantities(f, g, decomp_f, decomp_g)

    support = positive_support(f, g, 0.0)
    support_fraction = support / n
    main_fraction = quantities.main_count / n
    main_target = (mean_f + mean_g) / 2.0 - 3.0 * sigma
    return PairSumsetReport(
        b1=ec1.b,
        b2=ec2.b,
        N=n,
        eps=eps,
        sigma=sigma,
        eps0_requested=eps0,
        eps0_used=eps0_used,
        alpha=alpha,
        beta=beta,
        support_count=support,
        support_fraction=support_fraction,
        target_fraction=target,
        passed=support_fraction >= target,
        main_count=quantities.main_count,
        main_fraction=main_fraction,
        main_target=main_target,
        main_passed=main_fraction >= main_target,
        error_counts=dict(quantities.error_counts),
        error_count_reference=quantities.error_count_reference,
        error_l2sq=dict(quantities.error_l2sq),
        f1_max=decomp_f.f1_max,
        g1_max=decomp_g.f1_max,
        bohr_size_f=decomp_f.bohr.size,
        bohr_size_g=decomp_g.bohr.size,
    )


@dataclass(frozen=True)
class DeltaAggregate:
    """Best pair density for each reachable residue of the sumset.

    For x in G + G, ``delta_x[x]`` is the largest mean density over ordered
    pairs summing to x, with the lexicographically smallest witness pair;
    the lower bound adds (delta_x - eps) n / m over all x, clamping negative
    contributions to zero.
    """

    delta_x: dict[int, float]
    witness: dict[int, tuple[int, int]]
    eps: float
    n: int
    m: int
    lower_bound: float


def aggregate_delta(
    part: ResiduePartition, pair_reports, eps: float
) -> DeltaAggregate:
    """Aggregate pair densities over the good set into per-residue maxima.

    ``pair_reports`` is accepted for interface symmetry (witness pairs are
    chosen by density alone, which is symmetric in the pair order).
    """
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    good = sorted(part.good)
    if not good:
        raise DomainError("the good set is empty; nothing to aggregate")
    m = part.modulus.m
    delta_x: dict[int, float] = {}
    witness: dict[int, tuple[int, int]] = {}
    for b1 in good:
        for b2 in good:
            x = (b1 + b2) % m
            val = (part.delta_b[b1] + part.delta_b[b2]) / 2.0
            if x not in delta_x or val > delta_x[x]:
                delta_x[x] = val
                witness[x] = (b1, b2)
    lower = sum(
        max(v - eps, 0.0) * part.n / m for _, v in sorted(delta_x.items())
    )
    return DeltaAggregate(
        delta_x=dict(sorted(delta_x.items())),
        witness=dict(sorted(witness.items())),
        eps=eps,
        n=part.n,
        m=m,
        lower_bound=lower,
    )
