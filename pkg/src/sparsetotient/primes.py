"""Prime tables, deterministic primality, primorials and short-interval checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import PreconditionError, ResourceError, UnsupportedInputError

# Segment length (entries) above which the sieve works piecewise.
SEGMENT = 1 << 25
# Hard cap on table size; packed bits plus the ordered list stay under ~3 GB.
MAX_TABLE_LIMIT = 1 << 34

UINT64_MAX = (1 << 64) - 1

# The first thirteen primes as Miller-Rabin bases decide every n below the
# smallest strong pseudoprime to all of them (~3.317e24), far past 64 bits.
# Twelve bases are not enough there: 318665857834031151167461 fools them all.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


@dataclass(frozen=True)
class PrimeTable:
    """Sieved primes up to ``limit``.

    ``membership`` is a little-endian packed bit array (bit n set iff n is prime)
    and ``ordered`` the ascending primes as int64.
    """

    limit: int
    membership: np.ndarray
    ordered: np.ndarray

    def __contains__(self, n: int) -> bool:
        if n < 0 or n > self.limit:
            raise ValueError(f"{n} outside table range [0, {self.limit}]")
        return bool((self.membership[n >> 3] >> (n & 7)) & 1)

    def __len__(self) -> int:
        return len(self.ordered)

    def mask(self) -> np.ndarray:
        """Unpacked boolean view, length ``limit + 1``."""
        bits = np.unpackbits(self.membership, bitorder="little")
        return bits[: self.limit + 1].astype(bool)

    def count_upto(self, n: int) -> int:
        return int(np.searchsorted(self.ordered, n, side="right"))

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        """Primes q with lo <= q <= hi (hi clipped to the table)."""
        i = np.searchsorted(self.ordered, lo, side="left")
        j = np.searchsorted(self.ordered, hi, side="right")
        return self.ordered[i:j]


def _simple_sieve(n: int) -> np.ndarray:
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return is_p


def build_prime_table(limit: int) -> PrimeTable:
    if limit < 2:
        raise PreconditionError("prime table limit must be >= 2")
    if limit > MAX_TABLE_LIMIT:
        raise ResourceError(f"prime table limit {limit} exceeds {MAX_TABLE_LIMIT}")
    try:
        if limit + 1 <= SEGMENT:
            is_p = _simple_sieve(limit)
            packed = np.packbits(is_p, bitorder="little")
            ordered = np.flatnonzero(is_p).astype(np.int64)
            return PrimeTable(limit, packed, ordered)
        return _segmented(limit)
    except MemoryError as exc:
        raise ResourceError(f"not enough memory for a prime table to {limit}") from exc


def _segmented(limit: int) -> PrimeTable:
    base = np.flatnonzero(_simple_sieve(math.isqrt(limit))).tolist()
    packed_parts = []
    ordered_parts = []
    # SEGMENT is a multiple of 8, so packed segments concatenate bit-exactly.
    for lo in range(0, limit + 1, SEGMENT):
        hi = min(lo + SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            seg[: min(2, hi)] = False
        for p in base:
            pp = p * p
            if pp >= hi:
                break
            start = max(pp, -(-lo // p) * p)
            seg[start - lo :: p] = False
        packed_parts.append(np.packbits(seg, bitorder="little"))
        ordered_parts.append(np.flatnonzero(seg).astype(np.int64) + lo)
    return PrimeTable(limit, np.concatenate(packed_parts), np.concatenate(ordered_parts))


def _miller_rabin(n: int) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int, table: Optional[PrimeTable] = None) -> bool:
    """Exact primality for every n below 3.3e24 (all of 64-bit)."""
    if n < 2:
        return False
    if table is not None and n <= table.limit:
        return n in table
    if n >= _MR_BOUND:
        raise UnsupportedInputError(f"primality of {n} is beyond the deterministic range")
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < 43 * 43:
        return True
    return _miller_rabin(n)


_default = None


def default_table(min_limit: int = 1 << 20) -> PrimeTable:
    """A process-wide table grown by doubling on demand."""
    global _default
    if _default is None or _default.limit < min_limit:
        size = 1 << 20
        while size < min_limit:
            size *= 2
        _default = build_prime_table(size)
    return _default


def primes_upto(n: int) -> list:
    if n < 2:
        return []
    return default_table(n).primes_between(2, n).tolist()


def _primes_above(n: int, k: int, table: Optional[PrimeTable] = None) -> list:
    """The k smallest primes strictly greater than n."""
    for t in (table, _default):
        if t is not None and n < t.limit:
            i = int(np.searchsorted(t.ordered, n, side="right"))
            if i + k <= len(t.ordered):
                return t.ordered[i : i + k].tolist()
    out = []
    c = max(n + 1, 2)
    while len(out) < k:
        if c > UINT64_MAX:
            raise ResourceError("prime search ran past the 64-bit range")
        if is_prime(c, table):
            out.append(c)
        c += 1 if c == 2 else (2 if c % 2 else 1)
    return out


def next_primes_after(p: int, k: int, table: Optional[PrimeTable] = None) -> list:
    """[p_1, ..., p_k]: the k smallest primes greater than the prime p."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if not is_prime(p, table):
        raise PreconditionError(f"{p} is not prime")
    return _primes_above(p, k, table)


def next_prime(n: int, table: Optional[PrimeTable] = None) -> int:
    """Smallest prime strictly greater than n (n need not be prime)."""
    return _primes_above(n, 1, table)[0]


@lru_cache(maxsize=256)
def primorial(p: int) -> int:
    """Product of all primes <= p."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    return math.prod(primes_upto(p))


def prime_in_left_open_interval(lo, hi, table: Optional[PrimeTable] = None) -> Optional[int]:
    """Smallest prime q with lo < q <= hi; endpoints compared as exact rationals."""
    lo = Fraction(lo)
    hi = Fraction(hi)
    if not lo < hi:
        raise PreconditionError("need lo < hi")
    first = math.floor(lo) + 1
    last = math.floor(hi)
    for c in range(max(first, 2), last + 1):
        if is_prime(c, table):
            return c
    return None


def nagura_holds(n: int, table: Optional[PrimeTable] = None) -> bool:
    """Whether some prime q satisfies n < q < 6n/5."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return 5 * next_prime(n, table) < 6 * n


def p3_growth_check(p: int, table: Optional[PrimeTable] = None) -> bool:
    """5 * p_3 < 9 * p, with p_3 the third prime after p."""
    return 5 * next_primes_after(p, 3, table)[-1] < 9 * p


def nagura_range(lo: int, hi: int, table: PrimeTable) -> np.ndarray:
    """nagura_holds(n) for every lo <= n <= hi at once; the table must reach past 1.2 * hi."""
    n = np.arange(lo, hi + 1, dtype=np.int64)
    idx = np.searchsorted(table.ordered, n, side="right")
    if idx[-1] >= len(table.ordered):
        raise ResourceError("prime table too small for the requested range")
    return 5 * table.ordered[idx] < 6 * n


def p3_growth_range(lo: int, hi: int, table: PrimeTable) -> tuple:
    """(primes in [lo, hi], p3_growth_check for each) using table lookups."""
    i = int(np.searchsorted(table.ordered, lo, side="left"))
    j = int(np.searchsorted(table.ordered, hi, side="right"))
    if j + 3 > len(table.ordered):
        raise ResourceError("prime table too small for the requested range")
    ps = table.ordered[i:j]
    return ps, 5 * table.ordered[i + 3 : j + 3] < 9 * ps
