import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsetotient.errors import PreconditionError
from sparsetotient.families import (
    in_e2,
    in_e3,
    primorial_element,
    scan_e3,
    scan_fractional,
    scan_primes,
    scan_thm3,
    thm3_classify,
    x_np,
    x_structural_member,
    y_pk,
)
from sparsetotient.totient import Factorization


def brute_e2(p):
    # Prime c with A < c <= A + D, all cross-multiplied into integers.
    p1 = sympy.nextprime(p)
    p2 = sympy.nextprime(p1)
    base = p1 * p2 * (p - 1)
    width = (p1 - p) * (p2 - p)
    for c in range(p1 * p2 // p, (p1 * p2 * (p - 1) + width) // (p * (p - 1)) + 2):
        if base < c * p * (p - 1) <= base + width and sympy.isprime(c):
            return False
    return True


def brute_e3(p):
    p1 = sympy.nextprime(p)
    p2 = sympy.nextprime(p1)
    p3 = sympy.nextprime(p2)
    top = p1 * p2 * p3
    num = (p1 - 1) * (p2 - 1) * (p3 - 1)
    q = p1
    # The upper end 1 + num/((p-1)(q-1)) drops below q long before q > 2 sqrt(num).
    while q < 2 * math.isqrt(num) + 10:
        for c in range(max(q, top // (p * q)), num // ((p - 1) * (q - 1)) + 2):
            if c > q and c * p * q > top and (c - 1) * (q - 1) * (p - 1) <= num and sympy.isprime(c):
                return False
        q = sympy.nextprime(q)
    return True


def test_x_values():
    e = x_np(100, 3)
    assert e.integer == 60 and not e.structural_member
    assert x_np(1, 2).integer == 2
    assert x_np(4, 3).integer == 12 and x_np(4, 3).structural_member
    assert x_np(20, 11).integer == 4620
    with pytest.raises(PreconditionError):
        x_np(0, 3)
    with pytest.raises(PreconditionError):
        x_np(4, 9)


def test_structural_test():
    assert x_structural_member(60) == (2, 5)
    assert x_structural_member(510510) == (1, 17)
    assert x_structural_member(42) is None
    assert x_structural_member(1) is None
    assert x_structural_member(Factorization.from_pairs([(2, 2), (3, 1), (5, 1)])) == (2, 5)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31]))
def test_structural_int_and_factorization_agree(b, p):
    v = b * math.prod(sympy.primerange(2, p + 1))
    f = Factorization.from_pairs(sympy.factorint(v).items())
    assert x_structural_member(v) == x_structural_member(f)
    if b * math.prod(sympy.primefactors(b)) < 2 * p:
        assert x_structural_member(v) is not None


def test_y_values():
    assert [y_pk(p, 1).integer for p in (5, 7, 11, 13)] == [42, 330, 2730, 39270]
    assert y_pk(11, 2).integer == 46410 and y_pk(11, 2).structural_member
    assert y_pk(11, 3).integer == 881790 and y_pk(11, 3).structural_member
    assert not y_pk(3, 1).structural_member
    with pytest.raises(PreconditionError):
        y_pk(7, 5)
    with pytest.raises(PreconditionError):
        y_pk(9, 1)


def test_family_oracle_verdicts(oracle):
    assert y_pk(11, 2).with_verdict(oracle).oracle_verdict is True
    assert x_np(100, 3).with_verdict(oracle).oracle_verdict is True
    assert primorial_element(23).with_verdict(oracle).oracle_verdict is None
    assert y_pk(13, 2).with_verdict(oracle).oracle_verdict is True


def test_e2_record():
    r = in_e2(11)
    assert (r.p1, r.p2) == (13, 17)
    assert r.a_p == Fraction(221, 11) and r.d_p == Fraction(12, 110)
    assert r.in_e2 and r.blocking_prime is None
    r = in_e2(61)
    assert r.frac == Fraction(60, 61) and r.frac_decimal == "0.983606557377049"
    r = in_e2(3)
    assert not r.in_e2 and r.blocking_prime == 13


def test_e2_against_brute():
    for p in sympy.primerange(3, 6000):
        assert in_e2(p).in_e2 == brute_e2(p), p


def test_e3_against_brute():
    for p in sympy.primerange(2, 1500):
        assert in_e3(p).in_e3 == brute_e3(p), p


def test_e3_witnesses():
    assert in_e3(11) and in_e3(17) and in_e3(41)
    assert in_e3(3).blocking == (5, 29)
    r = in_e3(2)
    assert not r and r.blocking == (3, 19)


def test_thm3_flags():
    f = thm3_classify(11)
    assert (f.clause_i, f.clause_ii, f.clause_iii) == (2, True, None)
    assert thm3_classify(89).clause_i == 8
    f = thm3_classify(10007)
    assert f.p1 == 10009 and f.clause_i == 2 and f.clause_iii == (2, 30)
    assert thm3_classify(113).clause_i is None


def test_fractional_part_criterion():
    # frac + D < 1 leaves no integer in (A, A + D], so p is in E(2).
    for r in scan_fractional(10_000):
        if r.frac + r.d_p < 1:
            assert r.in_e2


def test_d_shrinks():
    recs = scan_fractional(10_000)
    hi = max(r.d_p for r in recs if 100 <= r.p <= 1000)
    lo = max(r.d_p for r in recs if 1000 <= r.p <= 10_000)
    assert lo < hi


def test_no_e2_or_e3_failures_found():
    assert all(r.in_e2 for r in scan_fractional(20_000))
    assert all(r.in_e3 for r in scan_e3(5000))


def test_scan_order_and_parallel():
    assert [r.p for r in scan_thm3(200)] == scan_primes(200)
    assert scan_primes(30) == [11, 13, 17, 19, 23, 29]
    serial = scan_fractional(25_000)
    assert scan_fractional(25_000, jobs=2) == serial
