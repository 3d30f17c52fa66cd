import numpy as np
import pytest
import sympy

from sparsetotient import core
from sparsetotient.core import SparseTotientOracle, question2_table, resolve_limit
from sparsetotient.errors import LimitError, PreconditionError
from sparsetotient.totient import search_bound

FIRST_13 = [2, 6, 12, 18, 30, 42, 60, 66, 90, 120, 126, 150, 210]
WINDOW = 60_000


@pytest.fixture(scope="module")
def naive_phi():
    return [0] + [int(sympy.totient(n)) for n in range(1, WINDOW + 1)]


@pytest.fixture(scope="module")
def naive_sparse(naive_phi):
    # y > 60000 has phi(y) > 0.18 y > 10^4, so the window settles every n <= 10^4.
    later = [0] * (WINDOW + 2)
    later[WINDOW + 1] = float("inf")
    for n in range(WINDOW, 0, -1):
        later[n] = min(later[n + 1], naive_phi[n])
    return [n for n in range(1, 10_001) if naive_phi[n] < later[n + 1]]


def test_matches_naive_definition(oracle, naive_sparse):
    assert [r.n for r in oracle.enumerate_n1(10_000)] == naive_sparse
    want = set(naive_sparse)
    assert all(oracle.is_sparsely_totient(n) == (n in want) for n in range(1, 3001))


def test_first_thirteen(oracle):
    recs = oracle.enumerate_n1(10**6)
    assert [r.n for r in recs[:13]] == FIRST_13
    assert recs[12].phi_n == 48 and recs[12].block_start == 48
    assert len(recs) == 150 and recs[-1].n == 930930


def test_n1_of(oracle, naive_phi):
    assert [oracle.n1_of(m) for m in (1, 4, 12)] == [2, 12, 42]
    best = [0] * 2000
    for x in range(1, WINDOW + 1):
        if naive_phi[x] < 2000:
            best[naive_phi[x]] = x
    for m in range(1, 2000):
        best[m] = max(best[m], best[m - 1])
        assert oracle.n1_of(m) == best[m]
    with pytest.raises(PreconditionError):
        oracle.n1_of(0)
    with pytest.raises(LimitError):
        oracle.n1_of(10**6)


def test_blocker_and_check(oracle):
    assert oracle.blocker(10) == 12
    assert not oracle.is_sparsely_totient(10)
    assert oracle.blocker(210) is None
    with pytest.raises(LimitError):
        oracle.is_sparsely_totient(oracle.limit + 1)
    with pytest.raises(PreconditionError):
        oracle.is_sparsely_totient(0)


def test_positive_needs_resolved_bound(small_oracle):
    # 9660 has no blocker inside 10^4, but B(phi(9660)) reaches past the table.
    assert small_oracle.blocker(9660) is None
    with pytest.raises(LimitError):
        small_oracle.is_sparsely_totient(9660)
    assert small_oracle.is_sparsely_totient(9240)
    with pytest.raises(LimitError):
        small_oracle.enumerate_n1(10_000)


def test_small_oracle_agrees(oracle, small_oracle):
    assert small_oracle.enumerate_n1(1000) == oracle.enumerate_n1(1000)


def test_preimage(oracle, naive_phi):
    assert oracle.phi_preimage(4) == [5, 8, 10, 12]
    assert oracle.phi_preimage(3) == []
    assert oracle.phi_preimage(1) == [1, 2]
    by_value = {}
    for x in range(1, WINDOW + 1):
        by_value.setdefault(naive_phi[x], []).append(x)
    for m in range(1, 600):
        assert oracle.phi_preimage(m) == by_value.get(m, [])


def test_bn1_bijection(oracle):
    rows = oracle.enumerate_bn1(10_000)
    ms = [m for _, m, _ in rows]
    assert ms == sorted(set(ms))
    assert all(oracle.n1_of(m) == n for _, m, n in rows)
    assert [k for k, _, _ in rows] == list(range(1, len(rows) + 1))


def test_limit_m(oracle):
    assert search_bound(oracle.limit_m) <= oracle.limit < search_bound(oracle.limit_m + 1)
    assert oracle.limit_m == 379103


def test_question2(oracle):
    rows = question2_table(oracle, 13)
    assert [n for _, _, n, _ in rows] == FIRST_13
    assert [m for _, m, _, _ in rows] == [1, 2, 4, 6, 8, 12, 16, 20, 24, 32, 36, 40, 48]
    assert all(n > k2 for _, _, n, k2 in rows)
    with pytest.raises(LimitError):
        question2_table(oracle, 10**4)


def test_tn1(oracle):
    r = oracle.tn1(2)
    assert (r.value, r.certified, r.last_exception) == (1, True, None)
    r = oracle.tn1(3)
    assert (r.value, r.certified, r.last_exception, r.certificate_bound) == (2, True, 2, 10)
    r = oracle.tn1(5)
    assert (r.value, r.certified, r.last_exception) == (128, False, 462)
    with pytest.raises(PreconditionError):
        oracle.tn1(4)


def test_tn1_definition(oracle):
    # Directly: p divides N_1(k) for every scanned k >= value, and fails just before it.
    rows = oracle.n1_range_records()
    for p in (5, 7, 11):
        v = oracle.tn1(p).value
        assert all(n % p == 0 for _, m, n in rows if m >= v)
        assert any(n % p for _, m, n in rows if m < v)


def test_last_not_divisible(oracle):
    assert oracle.last_not_divisible(3, 10**6) == 2
    assert oracle.last_not_divisible(5, 10**6) == 462


def test_resolve_limit(monkeypatch):
    monkeypatch.setenv(core.LIMIT_ENV, "5000")
    assert resolve_limit() == 5000
    assert resolve_limit(123) == 123
    monkeypatch.delenv(core.LIMIT_ENV)
    assert resolve_limit() == core.DEFAULT_LIMIT


def test_corrupted_table_changes_answer(oracle):
    t = oracle.totients
    phi = t.phi.copy()
    phi[35] = 2
    suffix = np.minimum.accumulate(phi[::-1])[::-1].copy()
    suffix[0] = suffix[1]
    bad = SparseTotientOracle(oracle.limit, oracle.primes, type(t)(t.limit, phi, t.spf, suffix))
    assert not bad.is_sparsely_totient(30)
