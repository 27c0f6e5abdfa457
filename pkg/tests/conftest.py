import numpy as np
import pytest

from zsspec import potential as P


@pytest.fixture(scope="session")
def zero_pot():
    return P.zero()


@pytest.fixture(scope="session")
def const11():
    return P.constant(1, 1)


@pytest.fixture(scope="session")
def single11():
    return P.single_mode(1, 1)


@pytest.fixture(scope="session")
def single12():
    return P.single_mode(1, 2)


@pytest.fixture(scope="session")
def real4():
    return P.smooth_real_four_mode()


@pytest.fixture(scope="session")
def cplx4():
    return P.complex_four_mode()


@pytest.fixture(scope="session")
def random8():
    return P.random_trig(8, 6, 0.3, real_type=False, seed=1)


def single_mode_omega(lam, a, b):
    return np.sqrt((lam + np.pi) ** 2 - a * b + 0j)


def single_mode_delta(lam, a, b):
    """Closed-form discriminant of phi1 = a e^{2 pi i x}, phi2 = b e^{-2 pi i x}."""
    return -2 * np.cos(single_mode_omega(lam, a, b))


def single_mode_mu(n, a, b):
    return -np.pi + np.sign(n + 1) * np.sqrt((n + 1) ** 2 * np.pi**2 + a * b + 0j)
