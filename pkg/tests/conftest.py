import pytest

from sparsetotient.core import DEFAULT_LIMIT, SparseTotientOracle, get_oracle


@pytest.fixture(scope="session")
def oracle():
    return get_oracle(DEFAULT_LIMIT)


@pytest.fixture(scope="session")
def small_oracle():
    return SparseTotientOracle(10_000)
