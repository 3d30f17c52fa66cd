"""Valuation machinery and constructive witnesses.

Every "N is not sparsely totient" argument here comes with an explicit y > N
with phi(y) <= phi(N).  Those witnesses drive the exponent bounds that
certify TN_1 scans, and the X-family constructions give finite-sum,
finite-product and progression patterns inside N_1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

from .errors import PreconditionError, ResourceError
from .families import x_np, x_structural_member
from .primes import UINT64_MAX, is_prime, next_prime, primes_upto
from .totient import Factorization, factorize, phi_of_factorization

IntOrFactorization = Union[int, Factorization]


def _as_factorization(n: IntOrFactorization) -> Factorization:
    return n if isinstance(n, Factorization) else factorize(n)


def d_ratio(a: Iterable[int], b: Iterable[int]) -> Fraction:
    """prod_{q in a} (q-1)/q  *  prod_{q in b} q/(q-1)."""
    out = Fraction(1)
    for q in a:
        out *= Fraction(q - 1, q)
    for q in b:
        out *= Fraction(q, q - 1)
    return out


def k_of(n: IntOrFactorization, y: IntOrFactorization) -> Factorization:
    """K(n, y): the part of y supported on the primes of n."""
    fn, fy = _as_factorization(n), _as_factorization(y)
    return Factorization.from_pairs((q, fy.valuation(q)) for q in fn.primes)


def l_of(n: IntOrFactorization, y: IntOrFactorization) -> Fraction:
    """L(n, y); exponents v_q(n) - v_q(y) may be negative, so this is a rational."""
    fn, fy = _as_factorization(n), _as_factorization(y)
    k = k_of(fn, fy).primes
    out = Fraction(1)
    for q, e in fn.pairs:
        out *= Fraction(q) ** (e - fy.valuation(q) if q in k else e - 1)
    return out


@dataclass(frozen=True)
class WitnessResult:
    y: Factorization
    phi_y: int
    case_used: str


def cpq_class(p: int, q: int) -> int:
    """Largest exponent of a prime q > p allowed in an N in N_1 with p not dividing N."""
    if q <= p:
        raise PreconditionError("cpq_class needs q > p")
    if q > p * (p - 1):
        return 0
    # 2q >= p + sqrt(p^2 + 4(p-1)^2), squared on both sides (2q - p > 0).
    if (2 * q - p) ** 2 >= p * p + 4 * (p - 1) ** 2:
        return 1
    return 2


def _prop1_case(p: int, q: int, r: int) -> Optional[str]:
    if r > 2:
        return "r>2"
    if r == 2 and (2 * q - p) ** 2 >= p * p + 4 * (p - 1) ** 2:
        return "r=2"
    if r == 1 and q >= (p - 1) ** 2 + p:
        return "r=1"
    return None


def witness_prop1(n: IntOrFactorization, p: int, q: int, r: int) -> WitnessResult:
    """y > N with phi(y) <= phi(N), for p < q, p not dividing N, q^r dividing N.

    n = q^r + k is the first multiple of p above q^r; N's primes are split by
    whether they divide n, and y = S * T * n * q^(v_q(N) - r).
    """
    fn = _as_factorization(n)
    if not (is_prime(p) and is_prime(q) and p < q):
        raise PreconditionError("need primes p < q")
    if r < 1 or fn.valuation(q) < r:
        raise PreconditionError(f"{q}^{r} does not divide N")
    if fn.valuation(p):
        raise PreconditionError(f"{p} divides N")
    case = _prop1_case(p, q, r)
    if case is None:
        raise PreconditionError(f"no case applies to p={p}, q={q}, r={r}")
    qr = q**r
    k = -qr % p
    mult = qr + k
    vq = fn.valuation(q)
    t_part = [(z, e) for z, e in fn.pairs if z != q and mult % z == 0]
    s_part = [(z, e) for z, e in fn.pairs if z != q and mult % z]
    y = Factorization.from_pairs(
        s_part + t_part + list(_as_factorization(mult).pairs) + [(q, vq - r)]
    )
    return WitnessResult(y, phi_of_factorization(y), case)


def beta(p: int, n: int, max_t: int = 1 << 17) -> int:
    """Smallest prime t >= p with n * phi(B_t) <= B_t, B_t the product of primes in [p, t]."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    if n < 2:
        raise PreconditionError("n must be >= 2")
    return _beta_product(p, n, max_t)[0]


@lru_cache(maxsize=None)
def _beta_product(p: int, n: int, max_t: int) -> tuple:
    b = 1
    f = 1
    t = p
    while True:
        if t > max_t:
            raise ResourceError(f"beta({p}, {n}) needs primes beyond {max_t}")
        b *= t
        f *= t - 1
        if n * f <= b:
            return t, b
        t = next_prime(t)


@lru_cache(maxsize=None)
def dpq_bound(p: int, q: int, max_t: int = 1 << 17) -> int:
    """alpha with q^alpha < A < q^(alpha + 1), A the product of primes in [p, beta(p, q)]."""
    if not (is_prime(p) and is_prime(q) and q < p):
        raise PreconditionError("need primes q < p")
    _, a = _beta_product(p, q, max_t)
    # Start just below log_q(A) and step up exactly.
    alpha = max(0, int((a.bit_length() - 1) / math.log2(q)) - 2)
    while q ** (alpha + 1) < a:
        alpha += 1
    return alpha


def witness_prop2(n: IntOrFactorization, p: int, q: int) -> WitnessResult:
    """y = S * q^(v - alpha) * A with S the q-free part of N; needs every prime of N below p."""
    fn = _as_factorization(n)
    if not (is_prime(p) and is_prime(q) and q < p):
        raise PreconditionError("need primes q < p")
    if any(z >= p for z in fn.primes):
        raise PreconditionError(f"N has a prime factor >= {p}")
    alpha = dpq_bound(p, q)
    v = fn.valuation(q)
    if v <= alpha:
        raise PreconditionError(f"v_{q}(N) = {v} does not exceed D_p(q) = {alpha}")
    t = beta(p, q)
    a_pairs = [(r, 1) for r in primes_upto(t) if r >= p]
    s_pairs = [(z, e) for z, e in fn.pairs if z != q]
    y = Factorization.from_pairs(s_pairs + [(q, v - alpha)] + a_pairs)
    return WitnessResult(y, phi_of_factorization(y), "prop2")


def swap_exponent_bound(p: int, q: int, max_power: int = UINT64_MAX) -> Optional[tuple]:
    """Smallest j, with its multiplier A, such that phi(A) <= q^j < A.

    A is squarefree over primes that cannot divide an N in N_1 with p not
    dividing N: p itself and primes beyond p(p - 1).  If v_q(N) > j then
    N * A / q^j is larger with no larger totient, so v_q(N) <= j.
    Returns (j, A) or None when no A is found below ``max_power``.
    """
    if q == p:
        raise PreconditionError("q must differ from p")
    floor_prime = p * (p - 1)
    j = 0
    t = 1
    while True:
        j += 1
        t *= q
        if t > max_power:
            return None
        if p - 1 <= t < p:
            return j, p
        if t + 1 > floor_prime and is_prime(t + 1):
            return j, t + 1
        # A = p * r: (p-1)(r-1) <= t < p r.
        lo = max(t // p + 1, floor_prime + 1)
        hi = t // (p - 1) + 1
        for r in range(lo, hi + 1):
            if is_prime(r):
                return j, p * r


def _exponent_bound(p: int, q: int, s0: int) -> int:
    bounds = []
    if q > p:
        bounds.append(cpq_class(p, q))
    swap = swap_exponent_bound(p, q)
    if swap is not None:
        bounds.append(swap[0])
    try:
        bounds.append(dpq_bound(s0, q, max_t=1 << 14))
    except ResourceError:
        pass
    if not bounds:
        raise ResourceError(f"no computable exponent bound for q={q}, p={p}")
    return min(bounds)


@lru_cache(maxsize=None)
def not_div_exponents(p: int) -> tuple:
    """(q, e(q)) for primes q < s0, q != p, with v_q(N) <= e(q) for N in N_1, p not dividing N."""
    if not is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    s0 = next_prime((p - 1) ** 2 + p)
    out = []
    for q in primes_upto(s0 - 1):
        if q == p:
            continue
        if q > p and cpq_class(p, q) == 0:
            out.append((q, 0))
            continue
        out.append((q, _exponent_bound(p, q, s0)))
    return tuple(out)


def not_div_bound(p: int) -> int:
    """Upper bound on every N in N_1 with p not dividing N."""
    return math.prod(q**e for q, e in not_div_exponents(p))


def smallest_nondividing_prime(n: IntOrFactorization) -> int:
    """Q(n): least prime not dividing n."""
    if isinstance(n, Factorization):
        ps = n.primes
        divides = lambda q: q in ps  # noqa: E731
    else:
        if n < 1:
            raise PreconditionError("n must be >= 1")
        divides = lambda q: n % q == 0  # noqa: E731
    q = 2
    while divides(q):
        q = next_prime(q)
    return q


def _strip_radical(n: int) -> int:
    f = factorize(n)
    return n // f.radical


def ip_witness(n_list: list) -> tuple:
    """(p, [X(n_i, p)]) whose finite sums all land in the X family.

    With m_i = n_i / rad(n_i) and p the smallest prime above (sum m_i)^2, any
    partial sum equals u * primorial(p) with u * rad(u) <= u^2 < p.
    """
    if not n_list:
        raise PreconditionError("n_list must be nonempty")
    total = sum(_strip_radical(n) for n in n_list)
    p = next_prime(total * total)
    return p, [x_np(n, p) for n in n_list]


def finite_sums(values: list) -> list:
    """All 2^r - 1 subset sums, in subset order."""
    out = []
    for r in range(1, len(values) + 1):
        for combo in itertools.combinations(values, r):
            out.append(sum(combo))
    return out


def mult_ip_prefix(count: int) -> list:
    """x_1 = X(2, 2) = 2 and x_n = X(2, p_n) with p_n the least prime above x_{n-1}^n."""
    if count < 1:
        raise PreconditionError("count must be >= 1")
    if count > 3:
        # x_3 = primorial(27011) already has ~11,700 digits; x_4 needs a prime above x_3^4.
        raise ResourceError("terms beyond the third are too large to represent")
    seq = [x_np(2, 2)]
    for i in range(2, count + 1):
        seq.append(x_np(2, next_prime(seq[-1].integer ** i)))
    return seq


def finite_products(elements: list) -> list:
    """Factorizations of every nonempty product of the given family elements."""
    out = []
    for r in range(1, len(elements) + 1):
        for combo in itertools.combinations(elements, r):
            f = Factorization.one()
            for e in combo:
                f = f * e.value
            out.append(f)
    return out


def lift_progression(m_list: list) -> list:
    """X(b_i, p) with b_i = m_i * rad(m_i) and p the least prime above max(b_i)/2.

    Each value is m_i * primorial(p), so arithmetic or geometric structure survives.
    """
    if not m_list:
        raise PreconditionError("m_list must be nonempty")
    bs = [m * factorize(m).radical for m in m_list]
    p = next_prime(max(bs) // 2)
    return [x_np(b, p) for b in bs]


def sum_product_in_x(x: int, y: int) -> bool:
    if x < 1 or y < 1:
        raise PreconditionError("x, y must be >= 1")
    return _in_x(x + y) and _in_x(x * y)


@lru_cache(maxsize=1 << 18)
def _in_x(v: int) -> bool:
    return x_structural_member(v) is not None


@dataclass(frozen=True)
class GapReport:
    elements: list
    gaps: list
    min_gap: Optional[int]
    # prime P -> largest element whose gap to its successor is not divisible by P
    last_nondivisible: dict


def additive_gap_report(oracle, lo: int, hi: int, primes: Iterable[int] = (2, 3, 5, 7, 11, 13)) -> GapReport:
    elems = [r.n for r in oracle.enumerate_n1(hi) if r.n >= lo]
    gaps = [b - a for a, b in zip(elems, elems[1:])]
    last = {}
    for P in primes:
        hits = [a for a, g in zip(elems, gaps) if g % P]
        last[P] = hits[-1] if hits else None
    return GapReport(elems, gaps, min(gaps) if gaps else None, last)
