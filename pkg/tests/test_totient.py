import math
import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsetotient.errors import LimitError, PreconditionError, UnsupportedInputError
from sparsetotient.totient import (
    Factorization,
    build_totient_table,
    factorize,
    phi_of_factorization,
    require_bound,
    search_bound,
    valuation,
)


def phi_gcd(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_small_values():
    t = build_totient_table(12)
    assert t.phi.tolist() == [0, 1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


def test_table_matches_gcd_count():
    t = build_totient_table(600)
    assert [int(t.phi[n]) for n in range(1, 601)] == [phi_gcd(n) for n in range(1, 601)]


def test_default_table_sample_against_sympy(oracle):
    rng = random.Random(3)
    for n in rng.sample(range(1, oracle.limit + 1), 3000):
        assert int(oracle.phi[n]) == sympy.totient(n)


def test_suffix_min():
    t = build_totient_table(100)
    phi = t.phi.tolist()
    for i in range(1, 101):
        assert t.suffix_min_at(i) == min(phi[i:])
    with pytest.raises(IndexError):
        t.suffix_min_at(0)
    with pytest.raises(IndexError):
        t.suffix_min_at(101)


def test_spf_factor():
    t = build_totient_table(5000)
    for n in range(1, 5001):
        f = t.factor(n)
        assert f.value == n
        assert dict(f.pairs) == sympy.factorint(n)


def test_factorize_beyond_table():
    f = factorize(2**61 - 1)
    assert f.pairs == ((2**61 - 1, 1),)
    assert factorize(600851475143).pairs == ((71, 1), (839, 1), (1471, 1), (6857, 1))
    with pytest.raises(UnsupportedInputError):
        factorize(2**64 + 1)
    with pytest.raises(PreconditionError):
        factorize(0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([2, 3, 5, 7, 11, 13, 101, 65537]), st.integers(0, 6)), max_size=6))
def test_factorization_phi_property(pairs):
    f = Factorization.from_pairs(pairs)
    assert phi_of_factorization(f) == sympy.totient(f.value)
    assert (f * f).value == f.value**2
    assert (f**3).value == f.value**3
    assert f.divide(f).value == 1


def test_factorization_helpers():
    f = Factorization.from_pairs([(3, 1), (2, 2), (3, 1)])
    assert f.pairs == ((2, 2), (3, 2))
    assert f.value == 36 and f.radical == 6 and not f.is_squarefree()
    assert f.primes == frozenset({2, 3})
    assert f.valuation(3) == 2 and f.valuation(5) == 0
    with pytest.raises(ValueError):
        Factorization(((3, 1), (2, 1)), 6)
    with pytest.raises(ValueError):
        f.divide(Factorization.from_pairs([(5, 1)]))
    assert valuation(48, 2) == 4
    assert valuation(0, 2) == math.inf


def test_search_bound_values():
    assert search_bound(1) == 2
    assert search_bound(4) == 12
    with pytest.raises(PreconditionError):
        search_bound(0)
    with pytest.raises(LimitError):
        require_bound(10**6, 10**6)


def test_search_bound_is_a_bound():
    # Every n with phi(n) = m satisfies n <= B(m).
    t = build_totient_table(200_000)
    phi = t.phi
    top = np.zeros(int(phi.max()) + 1, dtype=np.int64)
    np.maximum.at(top, phi[1:], np.arange(1, len(phi)))
    for m in np.flatnonzero(top).tolist():
        if m <= 30_000:
            assert top[m] <= search_bound(m), m
