import numpy as np
import pytest

from zsspec import monodromy as M
from zsspec import potential as P

from conftest import single_mode_delta


def const_exact(a, b, lam, x=1.0):
    A = np.array([[-1j * lam, 1j * a], [-1j * b, 1j * lam]]) * x
    w = np.sqrt((lam**2 - a * b) * x**2 + 0j)
    s = np.sinc(w / np.pi)  # sin w / w, regular at 0
    return np.cos(w) * np.eye(2) + s * A


def test_zero_potential_is_diagonal_exponential(zero_pot):
    m = M.fundamental_matrix(zero_pot, 1.0, np.pi).as_array()
    assert np.allclose(m, -np.eye(2), atol=1e-13)
    for lam in (0.3, 7.1 + 0.4j, -40.0):
        m = M.fundamental_matrix(zero_pot, 0.6, lam).as_array()
        assert np.allclose(m, np.diag([np.exp(-0.6j * lam), np.exp(0.6j * lam)]), atol=1e-12)


@pytest.mark.parametrize("lam", [0.0, 1.0, 2.5, -7.0 + 0.3j, 33.3])
def test_constant_potential_matches_exponential(const11, lam):
    m = M.fundamental_matrix(const11, 1.0, lam).as_array()
    assert np.allclose(m, const_exact(1, 1, lam), atol=1e-11)


def test_constant_partial_interval():
    p = P.constant(0.5 + 0.2j, -1.0)
    m = M.fundamental_matrix(p, 0.35, 3.0 - 1j).as_array()
    assert np.allclose(m, const_exact(0.5 + 0.2j, -1.0, 3.0 - 1j, 0.35), atol=1e-12)


def test_constant_at_lambda_one_is_identity_plus_a(const11):
    m = M.fundamental_matrix(const11, 1.0, 1.0).as_array()
    A = np.array([[-1j, 1j], [-1j, 1j]])
    assert np.allclose(m, np.eye(2) + A, atol=1e-12)


def test_discriminant_frozen_values(zero_pot, const11):
    assert abs(M.discriminant(zero_pot, 0.0) - 2) < 1e-13
    assert abs(M.discriminant(const11, 0.0) - 3.0861613) < 1e-7
    assert abs(M.discriminant(const11, 0.0) - 2 * np.cosh(1)) < 1e-12
    assert abs(M.discriminant(const11, 1.0) - 2) < 1e-12


def test_antidiscriminant_constant():
    p = P.constant(1, 2)
    w = np.sqrt(np.pi**2 - 2)
    assert abs(M.antidiscriminant(p, np.pi) - (-1j * np.sin(w) / w)) < 1e-12
    assert abs(M.antidiscriminant(P.constant(1, 1), 2.0)) < 1e-12


def test_dirichlet_char(zero_pot, const11):
    for lam in (0.7, 2.0 - 0.5j):
        assert abs(M.dirichlet_char(zero_pot, lam) - np.sin(lam)) < 1e-12
    a, b, lam = 0.3, -1.1j, 4.2
    w = np.sqrt(lam**2 - a * b)
    want = (lam - (a + b) / 2) * np.sin(w) / w
    assert abs(M.dirichlet_char(P.constant(a, b), lam) - want) < 1e-12
    assert abs(M.dirichlet_char(const11, np.sqrt(np.pi**2 + 1))) < 1e-12


def test_single_mode_closed_form(single12):
    for lam in (0.4, -3.0, 25.0 + 0.5j, 123.4):
        assert abs(M.discriminant(single12, lam) - single_mode_delta(lam, 1, 2)) < 1e-10 * (1 + abs(lam))


@pytest.mark.parametrize("lam", [0.2, 9.0 - 0.7j, 61.0])
def test_wronskian(random8, lam):
    for x in (0.3, 1.0):
        assert abs(M.fundamental_matrix(random8, x, lam).det() - 1) < 1e-10


def test_discriminant_jet_zero(zero_pot):
    lam = 2.3
    d = M.discriminant_jet(zero_pot, lam)
    assert np.allclose(d, [2 * np.cos(lam), -2 * np.sin(lam), -2 * np.cos(lam)], atol=1e-12)


@pytest.mark.parametrize("lam", [3.0, 14.5 + 0.2j])
def test_discriminant_jet_oracles(random8, lam):
    D, D1, D2 = M.discriminant_jet(random8, lam)
    assert abs(D1 - M.ddelta_quadrature(random8, lam)) < 1e-8
    h = 1e-5
    fd = (M.discriminant(random8, lam + h) - M.discriminant(random8, lam - h)) / (2 * h)
    assert abs(D1 - fd) < 1e-6
    fd2 = (M.discriminant(random8, lam + 1e-3) - 2 * D + M.discriminant(random8, lam - 1e-3)) / 1e-6
    assert abs(D2 - fd2) < 1e-4


def test_monodromy_jet_entries_match_finite_differences(real4):
    lam, h = 7.5, 1e-4
    j = M.monodromy_jet(real4, 0.8, lam)
    fp = M.fundamental_matrix(real4, 0.8, lam + h).as_array()
    fm = M.fundamental_matrix(real4, 0.8, lam - h).as_array()
    assert np.allclose(j.dM.as_array(), (fp - fm) / (2 * h), atol=1e-7)
    assert np.allclose(j.ddM.as_array(), (fp - 2 * j.M.as_array() + fm) / h**2, atol=1e-4)


def test_batch_matches_scalar(cplx4):
    lams = np.array([1.0, 5.0 + 1j, 80.0])
    r = M.monodromy_batch(cplx4, lams)
    for k, lam in enumerate(lams):
        assert np.allclose(r[0, :, k], M.fundamental_matrix(cplx4, 1.0, lam).as_array().ravel(), atol=1e-11)


def test_iterated_series_oracle(random8):
    small = random8.scaled(1e-2)
    assert M.iterated_series(small, 1.0, 3.0, 0) == M.Mat2(np.exp(-3j), 0, 0, np.exp(3j))
    for lam in (2.0, -11.0, 19.5):
        a = M.iterated_series(small, 1.0, lam, 6).as_array()
        b = M.fundamental_matrix(small, 1.0, lam).as_array()
        assert np.allclose(a, b, atol=1e-9)


def test_iterated_series_zero_potential(zero_pot):
    s = M.iterated_series(zero_pot, 0.5, 4.0, 5).as_array()
    assert np.allclose(s, np.diag([np.exp(-2j), np.exp(2j)]))


def test_approximant_zero_potential(zero_pot):
    a = M.approx_monodromy_a1(zero_pot, 1.0, 50.0).as_array()
    assert np.allclose(a, np.diag([np.exp(-50j), np.exp(50j)]), atol=1e-15)
    with pytest.raises(ValueError):
        M.approx_monodromy_a1(zero_pot, 1.0, 0.0)


def test_approximant_error_scales_like_inverse_square(real4):
    errs = {}
    for lam in (50.0, 200.0):
        m = M.fundamental_matrix(real4, 1.0, lam)
        errs[lam] = (m - M.approx_monodromy_a1(real4, 1.0, lam)).norm()
    C = errs[50.0] * 50.0**2
    assert errs[200.0] <= 4 * C / 200.0**2


def test_discriminant_entire(random8):
    t = np.exp(2j * np.pi * np.arange(64) / 64)
    vals = np.array([M.discriminant(random8, 5.0 + 2.0 * z) for z in t])
    # trapezoid rule for the closed contour integral of Delta over |lam - 5| = 2
    integral = np.sum(vals * 2j * t) * (2 * np.pi / 64)
    assert abs(integral) < 1e-8 * max(1.0, np.abs(vals).max())


def test_input_validation(zero_pot):
    with pytest.raises(ValueError):
        M.fundamental_matrix(zero_pot, 1.5, 1.0)
    with pytest.raises(ValueError):
        M.fundamental_matrix(zero_pot, 1.0, 1.0, tol=0)
    with pytest.raises(ValueError):
        M.monodromy_batch(zero_pot, [1.0], order=3)


def test_convergence_error_has_context(monkeypatch, real4):
    monkeypatch.setattr(M, "MAX_CELLS", 64)
    with pytest.raises(M.ConvergenceError, match="lam="):
        M.fundamental_matrix(real4, 1.0, 500.0, tol=1e-15)
