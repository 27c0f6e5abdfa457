import json

import numpy as np
import pytest

from zsspec import potential as P


def test_grid_matches_modes():
    p = P.from_fourier({1: 2.0, -3: 0.5j}, {0: 1.0}, 16)
    x = np.arange(16) / 16
    want = 2 * np.exp(2j * np.pi * x) + 0.5j * np.exp(-6j * np.pi * x)
    assert np.allclose(p.grid(1), want, atol=1e-14)
    assert np.allclose(p.grid(2), 1.0)
    assert p.K == 3


def test_grid_to_modes_roundtrip():
    p = P.random_trig(5, 4, seed=3)
    back = P.grid_to_modes(p.grid(1), p.K, tol=1e-14)
    for n, v in p.modes1.items():
        assert abs(back[n] - v) < 1e-14


def test_evaluate_off_grid():
    p = P.single_mode(1, 2)
    assert abs(p.evaluate(1, np.array([0.25]))[0] - 1j) < 1e-14
    assert abs(p.evaluate(2, np.array([0.25]))[0] + 2j) < 1e-14


@pytest.mark.parametrize("bad", [48, 100])
def test_grid_size_not_power_of_two(bad):
    with pytest.raises(ValueError, match="power of two"):
        P.from_fourier({1: 1.0}, {}, bad)


def test_grid_too_small_for_modes():
    with pytest.raises(ValueError, match="4K"):
        P.from_fourier({5: 1.0}, {}, 16)


def test_fourier_coefficient_absent_mode_is_zero():
    p = P.single_mode(1, 2)
    assert P.fourier_coefficient(p, 1, 1) == 1
    assert P.fourier_coefficient(p, 2, -1) == 2
    assert P.fourier_coefficient(p, 1, 7) == 0
    assert P.fourier_coefficient(p, 1, 1000) == 0


def test_derivative_single_mode():
    p = P.single_mode(1, 1)
    d = P.derivative(p, 1, 2)
    assert np.allclose(d, -((2 * np.pi) ** 2) * p.grid(1), atol=1e-10)
    with pytest.raises(ValueError):
        P.derivative(p, 1, 9)


def test_sobolev_norm_constant():
    p = P.constant(1, 1)
    assert P.sobolev_norm(p, 3) == pytest.approx(np.sqrt(2))
    q = P.single_mode(1, 1)
    assert P.sobolev_norm(q, 1) == pytest.approx(np.sqrt(2 * (1 + 4 * np.pi**2)))


def test_real_type_detection(real4, cplx4):
    assert P.is_real_type(real4)
    assert not P.is_real_type(cplx4)
    assert P.is_real_type(P.single_mode(1, 1))
    assert not P.is_real_type(P.single_mode(1, 2))
    assert P.is_real_type(P.zero())


def test_presets_and_unknown():
    assert P.preset("zero").is_zero()
    assert P.preset("constant", 1, 2).modes2 == {0: 2}
    with pytest.raises(ValueError, match="unknown preset"):
        P.preset("square")


def test_reflected_swap():
    p = P.from_fourier({1: 1.0, 2: 3.0}, {-1: 2.0}, 32)
    q = p.reflected_swap()
    assert q.modes1 == {1: 2.0}
    assert q.modes2 == {-1: 1.0, -2: 3.0}


def test_json_roundtrip(tmp_path):
    p = P.random_trig(4, 3, seed=7)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(P.to_json_dict(p)))
    q = P.load(path)
    assert q.fingerprint() == p.fingerprint()


def test_json_preset_and_errors():
    q = P.from_json_dict({"preset": "single_mode", "a": {"re": 1, "im": 0}, "b": [2, 0]})
    assert q.modes2 == {-1: 2}
    with pytest.raises(ValueError, match="phi1"):
        P.from_json_dict({"phi1": {"n": 1}})
    with pytest.raises(ValueError, match="phi2"):
        P.from_json_dict({"phi2": [{"re": 1}]})
