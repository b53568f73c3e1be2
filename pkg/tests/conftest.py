import pytest

from harmonic_zeros.services.harmonic import TrinomialParams, make_trinomial
from harmonic_zeros.services.zeros import census


@pytest.fixture(scope="session")
def f1_params():
    """z^9 + z^4 + 0.5 conj(z)^4 - 1"""
    return TrinomialParams(9, 4, 1.0, 0.5)


@pytest.fixture(scope="session")
def f2_params():
    """z^9 + 4.5 z^4 + 7 conj(z)^4 - 1"""
    return TrinomialParams(9, 4, 4.5, 7.0)


@pytest.fixture(scope="session")
def annuli_params():
    return TrinomialParams(9, 4, 7.0, 14.0)


@pytest.fixture(scope="session")
def big_b_params():
    return TrinomialParams(9, 4, 1.0, 20.0)


@pytest.fixture(scope="session")
def big_a_params():
    return TrinomialParams(9, 4, 20.0, 1.0)


@pytest.fixture(scope="session")
def f1_census(f1_params):
    return census(make_trinomial(f1_params))


@pytest.fixture(scope="session")
def f2_census(f2_params):
    return census(make_trinomial(f2_params))


@pytest.fixture(scope="session")
def annuli_census(annuli_params):
    return census(make_trinomial(annuli_params))


@pytest.fixture(scope="session")
def big_b_census(big_b_params):
    return census(make_trinomial(big_b_params))


@pytest.fixture(scope="session")
def big_a_census(big_a_params):
    return census(make_trinomial(big_a_params))
