"""Exact Euler totients: a sieved table, factorizations, and the search bound B(m)."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
import sympy

from .errors import LimitError, PreconditionError, ResourceError, UnsupportedInputError
from .primes import PrimeTable, build_prime_table, primes_upto

UINT64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class Factorization:
    """Ascending (prime, exponent) pairs together with the value they represent."""

    pairs: tuple
    value: int

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "Factorization":
        merged = {}
        for q, e in pairs:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                merged[int(q)] = merged.get(int(q), 0) + int(e)
        items = tuple(sorted(merged.items()))
        return cls(items, math.prod(q**e for q, e in items))

    @classmethod
    def one(cls) -> "Factorization":
        return cls((), 1)

    def __post_init__(self):
        last = 1
        for q, e in self.pairs:
            if q <= last or e < 1:
                raise ValueError(f"malformed factorization {self.pairs}")
            last = q

    def __int__(self) -> int:
        return self.value

    def __mul__(self, other: "Factorization") -> "Factorization":
        return Factorization.from_pairs(self.pairs + other.pairs)

    def __pow__(self, k: int) -> "Factorization":
        return Factorization.from_pairs((q, e * k) for q, e in self.pairs)

    def divide(self, other: "Factorization") -> "Factorization":
        """Exact quotient; raises if other does not divide self."""
        d = dict(self.pairs)
        for q, e in other.pairs:
            if d.get(q, 0) < e:
                raise ValueError(f"{other.value} does not divide {self.value}")
            d[q] -= e
        return Factorization.from_pairs(d.items())

    @property
    def primes(self) -> frozenset:
        """W(x), the set of prime divisors."""
        return frozenset(q for q, _ in self.pairs)

    def valuation(self, q: int) -> int:
        for r, e in self.pairs:
            if r == q:
                return e
        return 0

    @property
    def radical(self) -> int:
        return math.prod(q for q, _ in self.pairs)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.pairs)


def phi_of_factorization(f: Factorization) -> int:
    return math.prod(q ** (e - 1) * (q - 1) for q, e in f.pairs)


def valuation(n: int, q: int) -> int:
    """v_q(n); v_q(0) is infinite and reported as math.inf."""
    if n == 0:
        return math.inf
    n = abs(n)
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


@dataclass(frozen=True)
class TotientTable:
    """phi[n] for 0 <= n <= limit (phi[0] unused), smallest prime factors, suffix minima."""

    limit: int
    phi: np.ndarray
    spf: np.ndarray
    suffix_min: np.ndarray

    def suffix_min_at(self, i: int) -> int:
        if not 1 <= i <= self.limit:
            raise IndexError(f"suffix_min_at({i}) outside [1, {self.limit}]")
        return int(self.suffix_min[i])

    def factor(self, n: int) -> Factorization:
        if not 1 <= n <= self.limit:
            raise IndexError(f"{n} outside table range")
        pairs = []
        while n > 1:
            q = int(self.spf[n])
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            pairs.append((q, e))
        return Factorization(tuple(pairs), math.prod(q**e for q, e in pairs))


def build_totient_table(limit: int, primes: Optional[PrimeTable] = None) -> TotientTable:
    if limit < 2:
        raise PreconditionError("totient table limit must be >= 2")
    if primes is None or primes.limit < limit:
        primes = build_prime_table(limit)
    try:
        phi = np.arange(limit + 1, dtype=np.int64)
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in primes.primes_between(2, limit).tolist():
            sl = phi[p::p]
            sl -= sl // p
            if p * p <= limit:
                view = spf[p * p :: p]
                view[view == 0] = p
        # Untouched entries are primes (or 0, 1): their own smallest factor.
        idx = np.flatnonzero(spf == 0)
        spf[idx] = idx
        suffix = np.minimum.accumulate(phi[::-1])[::-1].copy()
    except MemoryError as exc:
        raise ResourceError(f"not enough memory for a totient table to {limit}") from exc
    # Index 0 holds 0 and would poison every suffix minimum.
    suffix[0] = suffix[1]
    return TotientTable(limit, phi, spf, suffix)


def factorize(n: int, table: Optional[TotientTable] = None) -> Factorization:
    """Exact factorization of n >= 1; values above 64 bits must carry their own."""
    if n < 1:
        raise PreconditionError("factorize needs n >= 1")
    if table is not None and n <= table.limit:
        return table.factor(n)
    if n > UINT64_MAX:
        raise UnsupportedInputError(
            f"{n} exceeds 64 bits; construct it with a known factorization"
        )
    return Factorization.from_pairs(sympy.factorint(n).items())


@lru_cache(maxsize=None)
def _primorial_steps(count: int) -> tuple:
    """(phi(Z_k), Z_k) for the first ``count`` primorials, k = 1..count."""
    out = []
    z = 1
    f = 1
    bound = 100
    while True:
        ps = primes_upto(bound)
        if len(ps) >= count:
            break
        bound *= 2
    for p in ps[:count]:
        z *= p
        f *= p - 1
        out.append((f, z))
    return tuple(out)


def search_bound(m: int) -> int:
    """B(m) with phi(n) <= m  =>  n <= B(m).

    n with j distinct prime factors has n/phi(n) at most the same ratio for the
    first j primes, and j is capped by the largest primorial whose totient is <= m.
    """
    if m < 1:
        raise PreconditionError("search_bound needs m >= 1")
    count = 16
    while True:
        steps = _primorial_steps(count)
        phis = [f for f, _ in steps]
        k = bisect.bisect_right(phis, m)
        if k < count:
            break
        count *= 2
    f, z = steps[k - 1]
    return m * z // f


def require_bound(m: int, limit: int) -> int:
    b = search_bound(m)
    if b > limit:
        raise LimitError(f"B({m}) = {b} exceeds sieve limit {limit}", required=b)
    return b
