"""Exact prime and multiplicative arithmetic.

Sieves, primorials, factorizations, totients and threshold splits of
squarefree moduli.  Everything here is deterministic and exact; no
probabilistic primality tests are used anywhere.  Python integers are
arbitrary precision, so products such as primorials never wrap around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "PrimeTable",
    "FactoredModulus",
    "sieve_primes",
    "primorial",
    "factorize",
    "split_by_threshold",
]

_SIMPLE_SIEVE_LIMIT = 100_000_000
_SEGMENT_SIZE = 1 << 22


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to and including ``limit``, in ascending order."""

    limit: int
    primes: np.ndarray

    def __post_init__(self) -> None:
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)

    def __contains__(self, value: int) -> bool:
        i = int(np.searchsorted(self.primes, value))
        return i < self.primes.size and int(self.primes[i]) == int(value)


@dataclass(frozen=True)
class FactoredModulus:
    """A positive integer together with its full prime factorization.

    ``primes`` is an ascending tuple of (prime, exponent) pairs; ``totient``,
    ``radical`` and ``squarefree`` are derived once at construction.
    """

    m: int
    primes: tuple[tuple[int, int], ...]
    totient: int
    radical: int
    squarefree: bool

    @property
    def prime_divisors(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.primes)

    def divisors(self) -> list[int]:
        """All positive divisors of m, ascending."""
        divs = [1]
        for p, e in self.primes:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)


def _modulus_from_pairs(pairs: tuple[tuple[int, int], ...]) -> FactoredModulus:
    m = 1
    tot = 1
    rad = 1
    for p, e in pairs:
        m *= p**e
        tot *= p ** (e - 1) * (p - 1)
        rad *= p
    return FactoredModulus(
        m=m,
        primes=pairs,
        totient=tot,
        radical=rad,
        squarefree=all(e == 1 for _, e in pairs),
    )


def _simple_sieve(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_sieve(n: int) -> np.ndarray:
    root = math.isqrt(n)
    base = _simple_sieve(root)
    chunks = [base]
    lo = root + 1
    while lo <= n:
        hi = min(lo + _SEGMENT_SIZE, n + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                flags[start - lo :: p] = False
        chunks.append((np.flatnonzero(flags) + lo).astype(np.int64))
        lo = hi
    return np.concatenate(chunks)


def sieve_primes(n: int) -> PrimeTable:
    """Enumerate all primes <= n (requires n >= 2)."""
    if n < 2:
        raise DomainError(f"sieve limit must be >= 2, got {n}")
    n = int(n)
    if n <= _SIMPLE_SIEVE_LIMIT:
        return PrimeTable(limit=n, primes=_simple_sieve(n))
    return PrimeTable(limit=n, primes=_segmented_sieve(n))


def primorial(w: int) -> FactoredModulus:
    """Product of all primes <= w, with totient and radical attached."""
    if w < 2:
        raise DomainError(f"primorial bound must be >= 2, got {w}")
    ps = sieve_primes(w).primes
    return _modulus_from_pairs(tuple((int(p), 1) for p in ps))


def factorize(m: int) -> FactoredModulus:
    """Complete factorization by trial division (exact, deterministic)."""
    if m < 1:
        raise DomainError(f"modulus must be >= 1, got {m}")
    m = int(m)
    pairs: list[tuple[int, int]] = []
    rem = m
    d = 2
    while d * d <= rem:
        if rem % d == 0:
            e = 0
            while rem % d == 0:
                rem //= d
                e += 1
            pairs.append((d, e))
        d += 1 if d == 2 else 2
    if rem > 1:
        pairs.append((rem, 1))
    return _modulus_from_pairs(tuple(pairs))


def split_by_threshold(
    mod: FactoredModulus, t: int
) -> tuple[FactoredModulus, FactoredModulus]:
    """Split a squarefree modulus into (product of p <= t, product of p > t).

    The two parts are coprime and multiply back to the original modulus; an
    empty side is returned as the modulus 1 with an empty factorization.
    """
    if not mod.squarefree:
        raise DomainError(f"threshold split needs a squarefree modulus, got {mod.m}")
    if t < 1:
        raise DomainError(f"threshold must be a positive integer, got {t}")
    small = tuple((p, 1) for p, _ in mod.primes if p <= t)
    large = tuple((p, 1) for p, _ in mod.primes if p > t)
    return _modulus_from_pairs(small), _modulus_from_pairs(large)
