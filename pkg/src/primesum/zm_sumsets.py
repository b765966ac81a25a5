"""Cyclic and integer sumsets, representation-function moments, and the
moment-method lower-bound certificates over unit groups.

Counting is exact throughout: representation numbers come from integer
convolutions, moments are accumulated as Python integers, and collision
fractions are exact rationals.  Convolutions switch from a direct integer
product to a float FFT only when the direct cost is prohibitive, and the FFT
result must then pass a distance-to-integer certificate before rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DomainError,
    InvariantViolation,
    RangeOverflowError,
    SizeLimitError,
)
from .ntheory import FactoredModulus, factorize, primorial, sieve_primes

__all__ = [
    "SubsetOfZm",
    "RepresentationHistogram",
    "MomentCertificate",
    "HolderCertificate",
    "TailCountReport",
    "CollisionStats",
    "CkSeriesResult",
    "ZnStarReport",
    "BlockReport",
    "ExtremalConstruction",
    "sumset",
    "integer_sumset",
    "cyclic_sumset_size",
    "rep_histogram",
    "capital_R",
    "divisor_stratification",
    "collision_stats",
    "tail_count",
    "kth_moment",
    "ck_series",
    "holder_lower_bound",
    "choose_moment_order",
    "implied_constant_trend",
    "znstar_certificate",
    "extremal_construct",
    "mertens_ratio",
]

_DIRECT_CONV_WORK = 30_000_000
_BITMASK_WORK = 2_000_000_000
_TUPLE_ENUM_LIMIT = 100_000_000
_SPAN_LIMIT = 200_000_000


def _pack_bits(flags: np.ndarray) -> int:
    if flags.size == 0:
        return 0
    packed = np.packbits(flags.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _unpack_bits(bits: int, m: int) -> np.ndarray:
    if m == 0:
        return np.zeros(0, dtype=bool)
    raw = np.frombuffer(bits.to_bytes((m + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:m].astype(bool)


@dataclass(frozen=True)
class SubsetOfZm:
    """A subset of Z_m held as a bit-packed membership indicator.

    Bit x of ``bits`` is set exactly when x is a member.
    """

    m: int
    bits: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError(f"modulus must be >= 1, got {self.m}")
        if self.bits < 0 or self.bits >> self.m:
            raise DomainError("membership bits outside [0, m)")

    @staticmethod
    def from_members(m: int, members) -> "SubsetOfZm":
        bits = 0
        for x in members:
            x = int(x)
            if not 0 <= x < m:
                raise DomainError(f"member {x} outside Z_{m}")
            bits |= 1 << x
        return SubsetOfZm(m=m, bits=bits)

    @staticmethod
    def units(m: int) -> "SubsetOfZm":
        """The unit group Z_m^* as a subset."""
        if m < 1:
            raise DomainError(f"modulus must be >= 1, got {m}")
        flags = np.gcd(np.arange(m, dtype=np.int64), m) == 1
        return SubsetOfZm(m=m, bits=_pack_bits(flags))

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def members_array(self) -> np.ndarray:
        return np.flatnonzero(_unpack_bits(self.bits, self.m)).astype(np.int64)

    def member_set(self) -> frozenset[int]:
        return frozenset(int(x) for x in self.members_array())

    def indicator_array(self) -> np.ndarray:
        return _unpack_bits(self.bits, self.m).astype(np.int64)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.m and bool((self.bits >> x) & 1)


def _convolve_int_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact linear convolution of nonnegative integer vectors.

    Uses a direct integer product when affordable; otherwise a float FFT
    whose output must sit within 0.25 of integers before being rounded.
    """
    la, lb = int(a.size), int(b.size)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    if la * lb <= _DIRECT_CONV_WORK:
        return np.convolve(a.astype(np.int64), b.astype(np.int64))
    n = la + lb - 1
    nfft = 1 << (n - 1).bit_length()
    fa = np.fft.rfft(a.astype(np.float64), nfft)
    fb = np.fft.rfft(b.astype(np.float64), nfft)
    conv = np.fft.irfft(fa * fb, nfft)[:n]
    rounded = np.rint(conv)
    err = float(np.max(np.abs(conv - rounded)))
    if err >= 0.25:
        raise InvariantViolation(
            f"float convolution failed the exactness certificate (deviation {err:.3g})"
        )
    return rounded.astype(np.int64)


def _fold_cyclic(linear: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m, dtype=np.int64)
    for start in range(0, linear.size, m):
        seg = linear[start : start + m]
        out[: seg.size] += seg
    return out


def _cyclic_int_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m = int(a.size)
    return _fold_cyclic(_convolve_int_exact(a, b), m)


def sumset(b1: SubsetOfZm, b2: SubsetOfZm) -> SubsetOfZm:
    """Cyclic sumset {x + y mod m}, computed two independent ways.

    A shift-accumulate pass over the smaller set and the support of the
    exact integer convolution of the indicators must agree bit for bit.
    """
    if b1.m != b2.m:
        raise DomainError(f"mismatched moduli {b1.m} and {b2.m}")
    m = b1.m
    if b1.bits == 0 or b2.bits == 0:
        return SubsetOfZm(m=m, bits=0)
    small, big = (b1, b2) if b1.cardinality <= b2.cardinality else (b2, b1)
    if small.cardinality * m > _BITMASK_WORK:
        raise SizeLimitError(
            f"sumset workload too large ({small.cardinality} members over Z_{m}); "
            "use cyclic_sumset_size for a single-route count"
        )
    acc = 0
    big_bits = big.bits
    for x in small.members_array():
        acc |= big_bits << int(x)
    mask = (1 << m) - 1
    shifted = (acc | (acc >> m)) & mask

    conv = _cyclic_int_convolution(b1.indicator_array(), b2.indicator_array())
    conv_bits = _pack_bits(conv > 0)
    if conv_bits != shifted:
        raise InvariantViolation("sumset routes disagree")
    return SubsetOfZm(m=m, bits=shifted)


def cyclic_sumset_size(members: np.ndarray, m: int) -> int:
    """|A + A mod m| by certified integer convolution alone.

    Single-route fast path for large m where the dual-route ``sumset``
    would be too expensive; the convolution is still exact (either a direct
    integer product or a certified FFT).
    """
    arr = np.asarray(members, dtype=np.int64)
    if arr.size == 0:
        return 0
    if np.any(arr < 0) or np.any(arr >= m):
        raise DomainError(f"members outside Z_{m}")
    ind = np.zeros(m, dtype=np.int64)
    ind[arr] = 1
    conv = _cyclic_int_convolution(ind, ind)
    return int(np.count_nonzero(conv))


def _int_sumset_flags(a1: np.ndarray, a2: np.ndarray) -> tuple[int, np.ndarray]:
    """Indicator of {x + y} over the integers.

    Returns (offset, flags) where flags[i] marks membership of offset + i.
    Inputs must be sorted integer arrays.
    """
    if a1.size == 0 or a2.size == 0:
        return 0, np.zeros(0, dtype=bool)
    lo = int(a1[0]) + int(a2[0])
    hi = int(a1[-1]) + int(a2[-1])
    span = hi - lo + 1
    if span > _SPAN_LIMIT:
        raise SizeLimitError(f"integer sumset span {span} too large")
    if int(a1.size) * int(a2.size) <= 4_000_000:
        sums = (np.add.outer(a1, a2)).ravel() - lo
        flags = np.zeros(span, dtype=bool)
        flags[sums] = True
        return lo, flags
    ind1 = np.zeros(int(a1[-1]) - int(a1[0]) + 1, dtype=np.int64)
    ind1[a1 - int(a1[0])] = 1
    ind2 = np.zeros(int(a2[-1]) - int(a2[0]) + 1, dtype=np.int64)
    ind2[a2 - int(a2[0])] = 1
    conv = _convolve_int_exact(ind1, ind2)
    return lo, conv > 0


def integer_sumset(b1, b2) -> set[int]:
    """Sumset {x + y} of two finite integer sets (no reduction)."""
    a1 = np.unique(np.fromiter((int(x) for x in b1), dtype=np.int64))
    a2 = np.unique(np.fromiter((int(x) for x in b2), dtype=np.int64))
    lo, flags = _int_sumset_flags(a1, a2)
    return {int(i) + lo for i in np.flatnonzero(flags)}


@dataclass(frozen=True)
class RepresentationHistogram:
    """r[x] = number of ordered pairs of members summing to x mod m."""

    m: int
    r: np.ndarray
    source_card: int

    def __post_init__(self) -> None:
        self.r.setflags(write=False)


def rep_histogram(b: SubsetOfZm) -> RepresentationHistogram:
    """Ordered-pair representation counts of B + B in Z_m, exact."""
    ind = b.indicator_array()
    r = _cyclic_int_convolution(ind, ind)
    total = int(np.sum(r))
    if total != b.cardinality**2:
        raise InvariantViolation(
            f"representation counts sum to {total}, expected {b.cardinality ** 2}"
        )
    return RepresentationHistogram(m=b.m, r=r, source_card=b.cardinality)


def capital_R(b: SubsetOfZm, mod: FactoredModulus) -> np.ndarray:
    """R[x] = |{(member, unit) : member + unit = x mod m}|, two ways.

    Equivalently the number of members avoiding x modulo every prime divisor
    of m; both computations run and must agree exactly.  Requires a
    squarefree modulus and members inside the unit group.
    """
    if mod.m != b.m:
        raise DomainError(f"modulus mismatch: set over Z_{b.m}, factored {mod.m}")
    if not mod.squarefree:
        raise DomainError(f"modulus must be squarefree, got {mod.m}")
    units = SubsetOfZm.units(mod.m)
    if b.bits & ~units.bits:
        raise DomainError("members must lie in the unit group")
    m = mod.m
    r_route = _cyclic_int_convolution(b.indicator_array(), units.indicator_array())

    barr = b.members_array()
    per_prime = np.zeros(m, dtype=np.int64)
    if barr.size:
        xs = np.arange(m, dtype=np.int64)
        step = max(1, min(m, 4_000_000 // max(1, int(barr.size))))
        for lo in range(0, m, step):
            hi = min(m, lo + step)
            ok = np.ones((hi - lo, barr.size), dtype=bool)
            for p in mod.prime_divisors:
                ok &= (barr % p)[None, :] != (xs[lo:hi] % p)[:, None]
            per_prime[lo:hi] = ok.sum(axis=1)
    if not np.array_equal(r_route, per_prime):
        raise InvariantViolation("unit-shift and per-prime counts disagree")
    return r_route


def divisor_stratification(mod: FactoredModulus) -> dict[int, np.ndarray]:
    """Partition of Z_m into layers X_d = {x : gcd(x, m) = d}, keyed by d."""
    g = np.gcd(np.arange(mod.m, dtype=np.int64), mod.m)
    return {d: np.flatnonzero(g == d).astype(np.int64) for d in mod.divisors()}


@dataclass(frozen=True)
class CollisionStats:
    """Per-prime distinct-residue counts of a tuple and the exact rational
    weight sum over primes with a collision."""

    r_p: dict[int, int]
    f: Fraction


def collision_stats(b_tuple, mod: FactoredModulus) -> CollisionStats:
    """Distinct residues of the tuple modulo each prime divisor, and the sum
    of 1/p over primes where the tuple collides (fewer than k distinct)."""
    if not mod.squarefree:
        raise DomainError(f"modulus must be squarefree, got {mod.m}")
    tup = [int(x) for x in b_tuple]
    if not tup:
        raise DomainError("tuple must be nonempty")
    k = len(tup)
    r_p: dict[int, int] = {}
    weight = Fraction(0)
    for p in mod.prime_divisors:
        distinct = len({x % p for x in tup})
        r_p[p] = distinct
        if distinct <= k - 1:
            weight += Fraction(1, p)
    return CollisionStats(r_p=r_p, f=weight)


@dataclass(frozen=True)
class TailCountReport:
    """Exact count of k-tuples whose collision weight reaches beta, with the
    heuristic reference bound k^2 2^(-e^(beta / c k^2)) |B|^(k-2) phi(m)^2."""

    count: int
    total_tuples: int
    k: int
    beta: float
    c: float
    reference_bound: float


def tail_count(
    b: SubsetOfZm, k: int, beta, mod: FactoredModulus, c: float = 1.0
) -> TailCountReport:
    """Count ordered k-tuples of members with collision weight >= beta.

    Exhaustive and exact (rational weights, no rounding); guarded by a
    tuple-count limit.  ``c`` only parameterizes the attached reference
    bound, which is reported and never asserted.
    """
    if k < 1:
        raise DomainError(f"tuple length must be >= 1, got {k}")
    if c <= 0:
        raise DomainError(f"reference constant must be positive, got {c}")
    card = b.cardinality
    total = card**k
    if total > _TUPLE_ENUM_LIMIT:
        raise SizeLimitError(f"{total} tuples exceed the enumeration limit")
    beta_frac = beta if isinstance(beta, Fraction) else Fraction(float(beta))
    members = [int(x) for x in b.members_array()]
    primes = mod.prime_divisors
    residues = {p: [x % p for x in members] for p in primes}
    count = 0
    for idx in itertools.product(range(card), repeat=k):
        weight = Fraction(0)
        for p in primes:
            res = residues[p]
            if len({res[i] for i in idx}) <= k - 1:
                weight += Fraction(1, p)
        if weight >= beta_frac:
            count += 1
    arg = float(beta_frac) / (c * k * k)
    inner = math.exp(arg) if arg < 700 else math.inf
    decay = 2.0 ** (-inner) if inner < 1e300 else 0.0
    reference = (k * k) * decay * float(card) ** (k - 2) * float(mod.totient) ** 2
    return TailCountReport(
        count=count,
        total_tuples=total,
        k=k,
        beta=float(beta_frac),
        c=c,
        reference_bound=reference,
    )


@dataclass(frozen=True)
class MomentCertificate:
    """k-th moments of the representation counts with their stratification.

    ``s_rb`` is sum r_B(x)^k; ``s_r`` the same for the unit-shift counts R,
    which dominate pointwise; ``stratified`` reassembles ``s_r`` exactly over
    the gcd layers.  The comparator is the structure-independent reference
    |B|^k phi(m)^k / m^(k-1) / alpha^2.
    """

    m: int
    k: int
    card: int
    alpha: float
    s_rb: int
    s_r: int
    stratified: dict[int, int]
    comparator: float
    comparator_ratio: float
    holder_bound: float | None
    actual_sumset: int


def kth_moment(b: SubsetOfZm, k: int, mod: FactoredModulus) -> MomentCertificate:
    """Exact moment certificate for a subset of the unit group.

    All counts are Python integers (no overflow at any size); the chain
    s_rb <= s_r = sum of strata is verified exactly, and for k >= 2 the
    power-mean lower bound on |B+B| is checked against the true sumset.
    """
    if k < 1:
        raise DomainError(f"moment order must be >= 1, got {k}")
    if b.cardinality == 0:
        raise DomainError("certificate refused for the empty set")
    if mod.m != b.m:
        raise DomainError(f"modulus mismatch: set over Z_{b.m}, factored {mod.m}")
    if not mod.squarefree:
        raise DomainError(f"modulus must be squarefree, got {mod.m}")
    units = SubsetOfZm.units(mod.m)
    if b.bits & ~units.bits:
        raise DomainError("members must lie in the unit group")

    hist = rep_histogram(b)
    s_rb = sum(int(v) ** k for v in hist.r)
    big_r = capital_R(b, mod)
    if np.any(big_r < hist.r):
        raise InvariantViolation("unit-shift counts fail to dominate pointwise")
    strata = divisor_stratification(mod)
    stratified = {
        d: sum(int(big_r[x]) ** k for x in xs) for d, xs in sorted(strata.items())
    }
    s_r = sum(int(v) ** k for v in big_r)
    if sum(stratified.values()) != s_r:
        raise InvariantViolation("stratified moments fail to reassemble the total")
    if s_rb > s_r:
        raise InvariantViolation("restricted moment exceeds the unit-shift moment")

    card = b.cardinality
    alpha = card / mod.totient
    comparator = (
        float(card) ** k * float(mod.totient) ** k / float(mod.m) ** (k - 1) / alpha**2
    )
    ratio = float(s_rb) / comparator if comparator > 0 else math.inf

    actual = sumset(b, b).cardinality
    holder_bound: float | None = None
    if k >= 2:
        holder_bound = _holder_bound_value(card, s_rb, k)
        _assert_holder_exact(actual, card, s_rb, k)
    return MomentCertificate(
        m=mod.m,
        k=k,
        card=card,
        alpha=alpha,
        s_rb=s_rb,
        s_r=s_r,
        stratified=stratified,
        comparator=comparator,
        comparator_ratio=ratio,
        holder_bound=holder_bound,
        actual_sumset=actual,
    )


def _holder_bound_value(card: int, s: int, k: int) -> float:
    return math.exp((2.0 * k * math.log(card) - math.log(s)) / (k - 1))


def _assert_holder_exact(actual: int, card: int, s: int, k: int) -> None:
    # actual >= card^(2k/(k-1)) / s^(1/(k-1))  <=>  actual^(k-1) * s >= card^(2k)
    if actual ** (k - 1) * s < card ** (2 * k):
        raise InvariantViolation(
            f"power-mean bound exceeds the true sumset size ({actual})"
        )


@dataclass(frozen=True)
class HolderCertificate:
    """Unconditional lower bound |B+B| >= |B|^(2k/(k-1)) / (sum r^k)^(1/(k-1))."""

    m: int
    k: int
    card: int
    moment: int
    bound: float
    actual: int


def holder_lower_bound(b: SubsetOfZm, k: int) -> HolderCertificate:
    """Power-mean lower bound on |B+B| from the k-th representation moment.

    Valid for any subset of Z_m (no coprimality needed).  The inequality is
    verified in exact integer arithmetic before the float bound is reported.
    """
    if k < 2:
        raise DomainError(f"the bound needs k >= 2, got {k}")
    if b.cardinality == 0:
        raise DomainError("certificate refused for the empty set")
    hist = rep_histogram(b)
    s = sum(int(v) ** k for v in hist.r)
    actual = sumset(b, b).cardinality
    _assert_holder_exact(actual, b.cardinality, s, k)
    return HolderCertificate(
        m=b.m,
        k=k,
        card=b.cardinality,
        moment=s,
        bound=_holder_bound_value(b.cardinality, s, k),
        actual=actual,
    )


@dataclass(frozen=True)
class CkSeriesResult:
    """Partial sum of sum_j e^(2(k+1) 2^j) 2^(-e^(2^j / c k^2)) with a
    rigorous geometric tail bound."""

    c: float
    k: int
    partial_sum: float
    log_partial_sum: float
    tail_bound: float
    terms_used: int
    dominant_index: int
    maximizer_index_estimate: float | None


def _ck_term_log(j: int, c: float, k: int) -> float:
    ln2 = math.log(2.0)
    pow2 = 2.0**j
    arg = pow2 / (c * k * k)
    inner = math.exp(arg) if arg < 700 else math.inf
    if math.isinf(inner):
        return -math.inf
    return 2.0 * (k + 1) * pow2 - inner * ln2


def ck_series(
    c: float, k: int, j_max: int | None = None, tail_target: float = 1e-9
) -> CkSeriesResult:
    """Evaluate the doubly exponential series in log space.

    Terms are added until (a) the latest term is below 1e-30 of the running
    sum, (b) the index has passed the rigorous tail threshold
    ceil(log2(4 c^2 k^4 (k+1) / ln 2)), beyond which each term is at most
    2^(-2^j / (c k^2)), and (c) the geometric bound on everything dropped is
    below ``tail_target``.  ``j_max`` only forces a minimum number of terms.
    """
    if c <= 0:
        raise DomainError(f"constant must be positive, got {c}")
    if k < 1:
        raise DomainError(f"index must be >= 1, got {k}")
    if tail_target <= 0:
        raise DomainError(f"tail target must be positive, got {tail_target}")
    ln2 = math.log(2.0)
    j_rigorous = max(0, math.ceil(math.log2(4.0 * c * c * k**4 * (k + 1) / ln2)))

    def tail_from(j_start: int) -> float:
        # for j >= j_rigorous each term is <= a_j = 2^(-2^j/(c k^2)),
        # and a_(j+1) = a_j^2, so the tail is geometric once a_j < 1/2
        exponent = (2.0**j_start) / (c * k * k)
        a = 2.0**-exponent if exponent < 1e300 else 0.0
        if a >= 0.5:
            return math.inf
        return a / (1.0 - a)

    log_sum = -math.inf
    dominant = (-1, -math.inf)
    j = 0
    while True:
        term_log = _ck_term_log(j, c, k)
        if term_log > dominant[1]:
            dominant = (j, term_log)
        if term_log > -math.inf:
            if log_sum == -math.inf:
                log_sum = term_log
            else:
                hi, lo = max(log_sum, term_log), min(log_sum, term_log)
                log_sum = hi + math.log1p(math.exp(lo - hi))
        if log_sum > 709.0:
            raise RangeOverflowError(
                f"partial sum overflows a double (dominant term at j={dominant[0]})"
            )
        small_enough = term_log < log_sum + math.log(1e-30)
        past_forced = j_max is None or j >= j_max
        next_j = j + 1
        if (
            past_forced
            and small_enough
            and next_j > j_rigorous
            and tail_from(next_j) < tail_target
        ):
            break
        j = next_j
        if j > 100_000:
            raise RangeOverflowError("series failed to settle within 100000 terms")

    mx = c * k**3 * math.log(4.0 * c * k * k * (k + 1) / ln2)
    estimate = math.log2(mx) if mx > 0 else None
    return CkSeriesResult(
        c=c,
        k=k,
        partial_sum=math.exp(log_sum),
        log_partial_sum=log_sum,
        tail_bound=tail_from(j + 1),
        terms_used=j + 1,
        dominant_index=dominant[0],
        maximizer_index_estimate=estimate,
    )


def choose_moment_order(alpha: float) -> tuple[int, int]:
    """Moment order from the density: floor((log(1/a) / loglog(1/a))^(1/3)),
    clamped below by 3.  Returns (raw formula value, clamped order).

    Densities too close to 1 make the inner logarithm nonpositive; the raw
    value is then reported as 0 and the clamp applies.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"density must lie in (0, 1], got {alpha}")
    raw = 0
    big_l = math.log(1.0 / alpha) if alpha < 1 else 0.0
    if big_l > 1.0:
        inner = math.log(big_l)
        if inner > 0:
            raw = int(math.floor((big_l / inner) ** (1.0 / 3.0)))
    return raw, max(3, raw)


def implied_constant_trend(
    b: SubsetOfZm, mod: FactoredModulus, k_values=(2, 3, 4)
) -> list[dict]:
    """Per-k implied constants from the moment comparator.

    For each k, reports s_rb, the comparator, their ratio, and the constant
    log(ratio) / (k^3 log k) implied by an e^(C k^3 log k) envelope.
    """
    rows = []
    for k in k_values:
        cert = kth_moment(b, int(k), mod)
        ratio = cert.comparator_ratio
        implied = (
            math.log(ratio) / (k**3 * math.log(k)) if ratio > 0 and k >= 2 else None
        )
        rows.append(
            {
                "k": int(k),
                "s_rb": cert.s_rb,
                "comparator": cert.comparator,
                "ratio": ratio,
                "implied_constant": implied,
            }
        )
    return rows


@dataclass(frozen=True)
class BlockReport:
    """One radical-length block of a non-squarefree reduction."""

    j: int
    start: int
    count: int
    alpha_j: Fraction
    selected: bool
    bound: float | None
    actual_cyclic: int | None


@dataclass(frozen=True)
class ZnStarReport:
    """Full lower-bound certificate for a subset of a unit group.

    For squarefree m this is a direct moment certificate.  Otherwise the set
    is cut into blocks of radical length, dense blocks are certified inside
    Z_radical, and the block bounds add up because integer block sumsets
    live in disjoint windows; the final bound is then checked against the
    exact integer sumset.
    """

    m: int
    card: int
    alpha_units: float
    alpha_total: Fraction
    k_formula: int
    k: int
    squarefree: bool
    certificate: MomentCertificate | None
    blocks: tuple[BlockReport, ...] | None
    block_mass_lhs: Fraction | None
    block_mass_rhs: Fraction | None
    final_bound: float
    actual_cyclic: int
    actual_integer: int | None


def znstar_certificate(b: SubsetOfZm, mod: FactoredModulus) -> ZnStarReport:
    """Lower-bound certificate for |B+B| when B sits inside Z_m^*."""
    if b.cardinality == 0:
        raise DomainError("certificate refused for the empty set")
    if mod.m != b.m:
        raise DomainError(f"modulus mismatch: set over Z_{b.m}, factored {mod.m}")
    units = SubsetOfZm.units(mod.m)
    if b.bits & ~units.bits:
        raise DomainError("members must lie in the unit group")

    card = b.cardinality
    alpha_units = card / mod.totient
    alpha_total = Fraction(card, mod.m)
    k_formula, k = choose_moment_order(alpha_units)
    actual_cyclic = sumset(b, b).cardinality

    if mod.squarefree:
        cert = kth_moment(b, k, mod)
        assert cert.holder_bound is not None
        return ZnStarReport(
            m=mod.m,
            card=card,
            alpha_units=alpha_units,
            alpha_total=alpha_total,
            k_formula=k_formula,
            k=k,
            squarefree=True,
            certificate=cert,
            blocks=None,
            block_mass_lhs=None,
            block_mass_rhs=None,
            final_bound=cert.holder_bound,
            actual_cyclic=actual_cyclic,
            actual_integer=None,
        )

    m1 = mod.radical
    rad_mod = factorize(m1)
    members = b.members_array()
    n_blocks = mod.m // m1
    blocks: list[BlockReport] = []
    selected_sets: list[SubsetOfZm] = []
    mass = Fraction(0)
    final_bound = 0.0
    for j in range(n_blocks):
        lo = j * m1
        in_block = members[(members >= lo) & (members < lo + m1)]
        alpha_j = Fraction(int(in_block.size), m1)
        mass += alpha_j
        selected = alpha_j > alpha_total / 2
        bound_j: float | None = None
        actual_j: int | None = None
        if selected:
            block_set = SubsetOfZm.from_members(m1, (in_block - lo).tolist())
            cert_j = kth_moment(block_set, k, rad_mod)
            assert cert_j.holder_bound is not None
            bound_j = cert_j.holder_bound
            actual_j = cert_j.actual_sumset
            final_bound += bound_j
            selected_sets.append(block_set)
        blocks.append(
            BlockReport(
                j=j,
                start=lo,
                count=int(in_block.size),
                alpha_j=alpha_j,
                selected=bool(selected),
                bound=bound_j,
                actual_cyclic=actual_j,
            )
        )
    rhs = alpha_total * n_blocks
    if mass != rhs:
        raise InvariantViolation(
            f"block densities sum to {mass}, expected {rhs}"
        )
    actual_integer = len(integer_sumset(members.tolist(), members.tolist()))
    # block bounds certify cyclic block sumsets, which lower-bound the
    # integer block sumsets sitting in disjoint windows of length 2 m1
    if final_bound > actual_integer + 1e-9:
        raise InvariantViolation(
            f"block bound {final_bound} exceeds the integer sumset {actual_integer}"
        )
    return ZnStarReport(
        m=mod.m,
        card=card,
        alpha_units=alpha_units,
        alpha_total=alpha_total,
        k_formula=k_formula,
        k=k,
        squarefree=False,
        certificate=None,
        blocks=tuple(blocks),
        block_mass_lhs=mass,
        block_mass_rhs=rhs,
        final_bound=final_bound,
        actual_cyclic=actual_cyclic,
        actual_integer=actual_integer,
    )


@dataclass(frozen=True)
class ExtremalConstruction:
    """Residue-constrained set over the product of the first s primes.

    Members are 1 modulo each of the first t primes and nonzero modulo the
    rest, so the sumset collapses modulo the small primes while the set
    retains nearly full density among the large ones.
    """

    s: int
    t: int
    m: int
    set: SubsetOfZm
    predicted_sumset: int
    predicted_alpha: Fraction


def extremal_construct(s: int, t: int) -> ExtremalConstruction:
    """Build the frozen/nonzero residue family via explicit reconstruction."""
    if not 1 <= t < s:
        raise DomainError(f"need 1 <= t < s, got t={t}, s={s}")
    limit = 8
    while True:
        primes = [int(p) for p in sieve_primes(limit).primes]
        if len(primes) >= s:
            break
        limit *= 2
    primes = primes[:s]
    m = math.prod(primes)
    if m > 100_000_000:
        raise RangeOverflowError(f"modulus {m} too large to materialize")
    expected_card = math.prod(p - 1 for p in primes[t:])
    if expected_card > 10_000_000:
        raise SizeLimitError(f"{expected_card} members exceed the enumeration limit")
    basis = []
    for p in primes:
        rest = m // p
        basis.append(rest * pow(rest, -1, p) % m)
    allowed = [[1] if i < t else list(range(1, primes[i])) for i in range(s)]
    members = []
    for combo in itertools.product(*allowed):
        members.append(sum(r * e for r, e in zip(combo, basis)) % m)
    built = SubsetOfZm.from_members(m, members)
    if built.cardinality != expected_card:
        raise InvariantViolation(
            f"construction yielded {built.cardinality} members, expected {expected_card}"
        )
    units = SubsetOfZm.units(m)
    if built.bits & ~units.bits:
        raise InvariantViolation("construction left the unit group")
    small_product = math.prod(primes[:t])
    return ExtremalConstruction(
        s=s,
        t=t,
        m=m,
        set=built,
        predicted_sumset=m // small_product,
        predicted_alpha=Fraction(1, factorize(small_product).totient),
    )


def mertens_ratio(w: int) -> float:
    """m / (phi(m) loglog phi(m)) for the primorial of w.

    Requires phi(m) >= 3 so the double logarithm is positive; the first
    usable bound is w = 5.
    """
    if w < 3:
        raise DomainError(f"need w >= 3, got {w}")
    mod = primorial(w)
    if mod.totient < 3:
        raise DomainError(
            f"phi({mod.m}) = {mod.totient} < 3 leaves loglog nonpositive"
        )
    return mod.m / (mod.totient * math.log(math.log(mod.totient)))
