"""The exact sparsely-totient oracle over a sieved totient table.

A number n is sparsely totient when every y > n has phi(y) > phi(n).  The
table only reaches ``limit``; a positive answer is trusted only when the
search bound B(phi(n)) fits inside it, while a negative answer is certified
by the blocker found in range.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import LimitError, PreconditionError
from .primes import PrimeTable, build_prime_table, is_prime
from .totient import (
    TotientTable,
    build_totient_table,
    factorize,
    require_bound,
    search_bound,
)

DEFAULT_LIMIT = 2_100_000
LIMIT_ENV = "STN_SIEVE_LIMIT"


@dataclass(frozen=True)
class SparseTotientRecord:
    n: int
    phi_n: int
    block_start: int


@dataclass(frozen=True)
class Tn1Result:
    p: int
    value: int
    certified: bool
    certificate_bound: Optional[int] = None
    # The last sparsely totient number not divisible by p that the scan found.
    last_exception: Optional[int] = None


class SparseTotientOracle:
    """Read-only queries about N_1, phi^{-1}, BN_1 and TN_1 up to a sieve limit."""

    def __init__(self, limit: int = DEFAULT_LIMIT, primes: Optional[PrimeTable] = None,
                 totients: Optional[TotientTable] = None):
        if limit < 2:
            raise PreconditionError("sieve limit must be >= 2")
        self.limit = limit
        start = time.perf_counter()
        self.primes = primes if primes is not None else build_prime_table(limit)
        self.totients = totients if totients is not None else build_totient_table(limit, self.primes)
        self.build_seconds = time.perf_counter() - start

    @property
    def phi(self) -> np.ndarray:
        return self.totients.phi

    @cached_property
    def limit_m(self) -> int:
        """Largest m with B(m) <= limit, i.e. the range where n1_of is defined."""
        lo, hi = 0, self.limit
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if search_bound(mid) <= self.limit:
                lo = mid
            else:
                hi = mid - 1
        return lo

    @cached_property
    def _candidates(self) -> np.ndarray:
        # n with phi(n) strictly below every phi(y), n < y <= limit.
        phi = self.totients.phi
        nxt = np.empty(self.limit + 1, dtype=np.int64)
        nxt[:-1] = self.totients.suffix_min[1:]
        nxt[-1] = np.iinfo(np.int64).max
        mask = phi < nxt
        mask[0] = False
        return np.flatnonzero(mask)

    def _check_resolved(self, n: int) -> None:
        require_bound(int(self.totients.phi[n]), self.limit)

    def n1_of(self, m: int) -> int:
        """max{x : phi(x) <= m}."""
        if m < 1:
            raise PreconditionError("n1_of needs m >= 1")
        require_bound(m, self.limit)
        # suffix_min is nondecreasing, so the answer is its last index <= m.
        return int(np.searchsorted(self.totients.suffix_min, m, side="right")) - 1

    def blocker(self, n: int) -> Optional[int]:
        """Smallest y > n in the table with phi(y) <= phi(n), if any."""
        if not 1 <= n <= self.limit:
            raise LimitError(f"{n} outside sieve range", required=n)
        phi = self.totients.phi
        if n == self.limit or phi[n] < self.totients.suffix_min[n + 1]:
            return None
        # Any y with phi(y) <= phi(n) satisfies y <= B(phi(n)).
        hi = min(self.limit, search_bound(int(phi[n])))
        hits = np.flatnonzero(phi[n + 1 : hi + 1] <= phi[n])
        if hits.size == 0:
            # Only reachable with an inconsistent table; fall back to a full scan.
            hits = np.flatnonzero(phi[n + 1 :] <= phi[n])
        return n + 1 + int(hits[0])

    def is_sparsely_totient(self, n: int) -> bool:
        if n < 1:
            raise PreconditionError("n must be >= 1")
        if n > self.limit:
            raise LimitError(f"{n} exceeds sieve limit {self.limit}", required=n)
        if self.blocker(n) is not None:
            return False
        self._check_resolved(n)
        return True

    def enumerate_n1(self, up_to: int) -> list:
        """All sparsely totient numbers <= up_to, ascending."""
        if up_to > self.limit:
            raise LimitError(f"{up_to} exceeds sieve limit {self.limit}", required=up_to)
        cand = self._candidates
        cand = cand[: np.searchsorted(cand, up_to, side="right")]
        phi = self.totients.phi
        out = []
        for n in cand.tolist():
            f = int(phi[n])
            require_bound(f, self.limit)
            out.append(SparseTotientRecord(n, f, f))
        return out

    def phi_preimage(self, m: int) -> list:
        """Ascending list of all x with phi(x) = m."""
        if m < 1:
            raise PreconditionError("m must be >= 1")
        b = require_bound(m, self.limit)
        return (np.flatnonzero(self.totients.phi[1 : b + 1] == m) + 1).tolist()

    def enumerate_bn1(self, up_to_m: int) -> list:
        """(k, m_k, N_1(m_k)) for every m_k in BN_1 with m_k <= up_to_m."""
        b = require_bound(up_to_m, self.limit)
        phi = self.totients.phi
        cand = self._candidates
        rows = []
        # Candidate totients strictly increase with n, and each one <= up_to_m
        # has B(phi) <= B(up_to_m) <= limit, so every row here is resolved.
        for n in cand[: np.searchsorted(cand, b, side="right")].tolist():
            f = int(phi[n])
            if f > up_to_m:
                break
            rows.append((len(rows) + 1, f, n))
        return rows

    def n1_range_records(self) -> list:
        """Every sparsely totient number whose block start is within limit_m."""
        return self.enumerate_bn1(self.limit_m)

    def last_not_divisible(self, d: int, up_to: int) -> Optional[int]:
        """Largest element of N_1 within [1, up_to] not divisible by d."""
        last = None
        for rec in self.enumerate_n1(up_to):
            if rec.n % d:
                last = rec.n
        return last

    def tn1(self, p: int, certificate_bound: Optional[int] = None) -> Tn1Result:
        """Smallest m in V such that p divides N_1(k) for every k >= m.

        The scan covers block starts up to ``limit_m``; the result is certified
        only if every N in N_1 with p not dividing N is provably in that range.
        """
        if not is_prime(p):
            raise PreconditionError(f"{p} is not prime")
        if certificate_bound is None:
            from .structure import not_div_bound

            certificate_bound = not_div_bound(p)
        rows = self.n1_range_records()
        idx = None
        for i, (_, _, n) in enumerate(rows):
            if n % p:
                idx = i
        if idx is None:
            value, last = rows[0][1], None
            nxt_ok = True
        else:
            last = rows[idx][2]
            nxt_ok = idx + 1 < len(rows)
            value = rows[idx + 1][1] if nxt_ok else rows[idx][1]
        certified = nxt_ok and certificate_bound <= self.limit_m
        return Tn1Result(p, value, certified, certificate_bound, last)

    def factor(self, n: int):
        return factorize(n, self.totients)


_cache = {}


def resolve_limit(limit: Optional[int] = None) -> int:
    if limit is not None:
        return limit
    env = os.environ.get(LIMIT_ENV)
    return int(env) if env else DEFAULT_LIMIT


def get_oracle(limit: Optional[int] = None) -> SparseTotientOracle:
    """Process-wide oracle per limit; tables are immutable so sharing is safe."""
    limit = resolve_limit(limit)
    if limit not in _cache:
        _cache[limit] = SparseTotientOracle(limit)
    return _cache[limit]


def question2_table(oracle: SparseTotientOracle, count: int) -> list:
    """(k, m_k, N_1(m_k), k^2) for the first ``count`` elements of BN_1."""
    rows = oracle.n1_range_records()[:count]
    if len(rows) == count:
        return [(k, m, n, k * k) for k, m, n in rows]
    raise LimitError(f"fewer than {count} elements of N_1 within the sieve")
