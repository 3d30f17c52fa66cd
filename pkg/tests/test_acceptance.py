"""The acceptance gate: one line per criterion, every one must pass."""

import pytest

from sparsetotient.acceptance import CRITERIA, DEFAULT_SEED, run_criterion


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA], ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, oracle, capsys):
    res = run_criterion(number, oracle, DEFAULT_SEED)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.status == "PASS", res.detail
