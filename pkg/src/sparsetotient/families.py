"""Explicit families of sparsely totient numbers and the prime-gap sets behind them.

X(n, p) = (n / rad n) * primorial(p), and Y(p, k) is the product of all primes up
to the k-th prime after p, with p itself left out.  Membership of Y(p, 2) and
Y(p, 3) hinges on E(2)/E(3): short intervals built from p and the primes just
after it must avoid primes.  All interval logic is exact rational arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from typing import Optional, Union

from .errors import PreconditionError
from .primes import (
    PrimeTable,
    default_table,
    is_prime,
    next_primes_after,
    prime_in_left_open_interval,
    primes_upto,
)
from .totient import Factorization, factorize

KINDS = ("X", "Y", "PRIMORIAL")

_DEC15 = Context(prec=15, rounding=ROUND_HALF_EVEN)


@dataclass(frozen=True)
class FamilyElement:
    kind: str
    params: tuple
    value: Factorization
    structural_member: bool
    oracle_verdict: Optional[bool] = None

    @property
    def integer(self) -> int:
        return self.value.value

    def with_verdict(self, oracle) -> "FamilyElement":
        """Attach the oracle's verdict when the value lies inside its sieve."""
        if self.integer > oracle.limit:
            return self
        return replace(self, oracle_verdict=oracle.is_sparsely_totient(self.integer))


def _primorial_factorization(p: int) -> Factorization:
    ps = primes_upto(p)
    return Factorization(tuple((q, 1) for q in ps), math.prod(ps))


def primorial_element(p: int) -> FamilyElement:
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    return FamilyElement("PRIMORIAL", (p,), _primorial_factorization(p), True)


def x_np(n: int, p: int) -> FamilyElement:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    fn = factorize(n)
    b = Factorization.from_pairs((q, e - 1) for q, e in fn.pairs)
    value = b * _primorial_factorization(p)
    return FamilyElement("X", (n, p), value, 2 * p > n)


def x_structural_member(v: Union[int, Factorization]) -> Optional[tuple]:
    """Witness (b, p) with v = b * primorial(p) and b * rad(b) < 2p, else None.

    p is the largest prime such that every prime up to it divides v; smaller
    choices of p can only make the test harder.
    """
    if isinstance(v, Factorization):
        exps = dict(v.pairs)
        p = None
        for q in _prime_stream():
            if exps.get(q, 0) < 1:
                break
            exps[q] -= 1
            p = q
        if p is None:
            return None
        b = Factorization.from_pairs(exps.items())
        return (b.value, p) if b.value * b.radical < 2 * p else None
    if v < 1:
        raise PreconditionError("v must be >= 1")
    rem = v
    p = None
    for q in _prime_stream():
        if rem % q:
            break
        rem //= q
        p = q
    if p is None or rem >= 2 * p:
        return None
    rad = factorize(rem).radical
    return (rem, p) if rem * rad < 2 * p else None


def _prime_stream():
    bound = 1 << 12
    start = 0
    while True:
        ps = primes_upto(bound)
        yield from ps[start:]
        start = len(ps)
        bound *= 4


def y_pk(p: int, k: int, table: Optional[PrimeTable] = None) -> FamilyElement:
    if k not in (1, 2, 3):
        raise PreconditionError(f"k must be 1, 2 or 3, got {k}")
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    top = next_primes_after(p, k, table)[-1]
    pairs = tuple((q, 1) for q in primes_upto(top) if q != p)
    value = Factorization(pairs, math.prod(q for q, _ in pairs))
    if k == 1:
        structural = p >= 5
    elif k == 2:
        structural = p >= 11 and in_e2(p, table).in_e2
    else:
        structural = p >= 11 and in_e3(p, table).in_e3
    return FamilyElement("Y", (p, k), value, structural)


@dataclass(frozen=True)
class E2Record:
    p: int
    p1: int
    p2: int
    a_p: Fraction
    d_p: Fraction
    blocking_prime: Optional[int]
    in_e2: bool
    frac: Fraction

    @property
    def frac_decimal(self) -> str:
        d = _DEC15.divide(Decimal(self.frac.numerator), Decimal(self.frac.denominator))
        return format(d, "f")


def in_e2(p: int, table: Optional[PrimeTable] = None) -> E2Record:
    """Whether (A(p), A(p) + D(p)] avoids primes; A = p1 p2 / p, D = (p1-p)(p2-p)/(p(p-1))."""
    p1, p2 = next_primes_after(p, 2, table)
    a = Fraction(p1 * p2, p)
    d = Fraction((p1 - p) * (p2 - p), p * (p - 1))
    blocking = prime_in_left_open_interval(a, a + d, table)
    return E2Record(p, p1, p2, a, d, blocking, blocking is None, a - math.floor(a))


@dataclass(frozen=True)
class E3Result:
    p: int
    in_e3: bool
    blocking: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.in_e3


def in_e3(p: int, table: Optional[PrimeTable] = None) -> E3Result:
    """Exact E(3) test.

    For each prime q > p the interval (p1 p2 p3 / (p q), 1 + R/(q-1)] with
    R = (p1-1)(p2-1)(p3-1)/(p-1) must hold no prime above q.  Once (q-1)^2 >= R
    the upper end is <= q, so only q with (q-1)^2 < R need checking.
    """
    p1, p2, p3 = next_primes_after(p, 3, table)
    top = p1 * p2 * p3
    r = Fraction((p1 - 1) * (p2 - 1) * (p3 - 1), p - 1)
    q = p1
    while (q - 1) ** 2 < r:
        lo = max(Fraction(top, p * q), Fraction(q))
        hi = 1 + r / (q - 1)
        if lo < hi:
            q2 = prime_in_left_open_interval(lo, hi, table)
            if q2 is not None:
                return E3Result(p, False, (q, q2))
        q = next_primes_after(q, 1, table)[0]
    return E3Result(p, True)


@dataclass(frozen=True)
class Thm3Flags:
    p: int
    p1: int
    p2: int
    clause_i: Optional[int]
    clause_ii: bool
    clause_iii: Optional[tuple]

    @property
    def any(self) -> bool:
        return self.clause_i is not None or self.clause_ii or self.clause_iii is not None


def thm3_classify(p: int, table: Optional[PrimeTable] = None) -> Thm3Flags:
    """Which gap hypotheses hold: p1 - p in {2,4,6,8}; (p+2, p+6) next; p >= 2ab."""
    p1, p2 = next_primes_after(p, 2, table)
    a, b = p1 - p, p2 - p
    return Thm3Flags(
        p,
        p1,
        p2,
        a if a in (2, 4, 6, 8) else None,
        a == 2 and b == 6,
        (a, b) if p >= 2 * a * b else None,
    )


SCAN_START = 11


def scan_primes(max_p: int, min_p: int = SCAN_START) -> list:
    return default_table(max_p).primes_between(min_p, max_p).tolist()


def _scan(func, max_p: int, jobs: int = 1) -> list:
    ps = scan_primes(max_p)
    if jobs <= 1 or len(ps) < 2000:
        return [func(p) for p in ps]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves input order regardless of scheduling.
        return list(pool.map(func, ps, chunksize=max(1, len(ps) // (8 * jobs))))


def scan_fractional(max_p: int, jobs: int = 1) -> list:
    """One E2Record per prime 11 <= p <= max_p; frac is the fractional part of p1 p2 / p."""
    return _scan(in_e2, max_p, jobs)


def scan_e3(max_p: int, jobs: int = 1) -> list:
    return _scan(in_e3, max_p, jobs)


def scan_thm3(max_p: int, jobs: int = 1) -> list:
    return _scan(thm3_classify, max_p, jobs)
