import json

import numpy as np
import pytest

from zsspec import asymptotics as A
from zsspec import potential as P
from zsspec import spectrum as S
from zsspec import verify as V


@pytest.fixture(scope="module")
def zero_table(zero_pot):
    return S.spectral_table(zero_pot, 8, 40)


@pytest.fixture(scope="module")
def const_table(const11):
    return S.spectral_table(const11, 8, 64)


def test_zero_potential_all_theorems_pass(zero_pot, zero_table):
    s = A.expansion_series(zero_pot, 1)
    for tag in A.THEOREMS:
        r = V.residual_report(zero_table, s, tag)
        assert np.max(np.abs(r.residuals)) < 1e-11
        assert r.passed


def test_constant_critical_point_decay(const11, const_table):
    s = A.expansion_series(const11, 2)
    r = V.residual_report(const_table, s, "1.4i")
    assert r.power == 3
    assert not r.floor_limited
    assert r.slope <= -2.7
    assert r.passed
    assert np.isfinite(r.sup_weighted)


def test_residual_antisymmetry(const11, const_table):
    s = A.expansion_series(const11, 1)
    preds = {row.n: (row.mu,) for row in const_table.rows}
    r = V.residual_report(const_table, s, "1.1", predictions=preds)
    assert np.all(r.residuals == 0)


def test_too_few_rows(zero_pot, const11):
    t = S.spectral_table(zero_pot, 4, 9)
    with pytest.raises(ValueError, match="converged rows"):
        V.residual_report(t, A.expansion_series(zero_pot, 1), "1.1")


def test_report_serialization(const11, const_table):
    r = V.residual_report(const_table, A.expansion_series(const11, 1), "1.1")
    d = json.loads(V.report_to_json(r))
    assert d["theorem"] == "1.1" and d["decay_power"] == 2
    assert len(d["residuals"]) == len(const_table.rows)
    head = r.to_csv().splitlines()[0].split(",")
    assert head[:4] == ["n", "residual_re", "residual_im", "weighted"]
    assert "PASS" in r.summary() or "FAIL" in r.summary()


def test_a1_check_zero(zero_pot):
    rep = V.a1_bound_check(zero_pot, [50, 100])
    assert rep.sup_weighted == 0 and rep.passed
    with pytest.raises(ValueError):
        V.a1_bound_check(zero_pot, [5])


def test_a1_check_constant(const11):
    for im in (0.0, 0.5):
        rep = V.a1_bound_check(const11, [complex(m, im) for m in (50, 100, 200, 400, 800)])
        assert rep.passed, rep.ratio


def test_perturbed_fourier_bound_examples():
    assert V.lemma_b1_check({1: 1.0}, 0.0, alpha=lambda n: 0.0).weighted_sum < 1e-20
    r = V.lemma_b1_check({1: 1.0}, 1.0)
    assert r.holds and r.bound == pytest.approx(np.e**2)
    f = P.random_trig(6, 5, seed=4).grid(1)
    r = V.lemma_b1_check(f, 0.5)
    assert r.holds
    with pytest.raises(ValueError):
        V.lemma_b1_check({1: 1.0}, 0.5, alpha=lambda n: 1.0)


def test_sqrt_perturbation_examples():
    assert V.sqrt_perturbation_check(1.0, 0.0)
    assert V.sqrt_perturbation_check(1.0, 0.5)
    r0, r1 = V.branch_sqrt(1.0, 0.5)
    assert abs(r1 - r0) == pytest.approx(0.2247448713915889)
    with pytest.raises(ValueError):
        V.sqrt_perturbation_check(1.0, 0.6)
    with pytest.raises(ValueError):
        V.sqrt_perturbation_check(0.0, 0.0)


def test_sqrt_branch_continuity_across_cut():
    # z just above the negative real axis: the principal root of z + h would jump
    z, h = -1 + 1e-3j, -2e-3j
    r0, r1 = V.branch_sqrt(z, h)
    assert abs(r1 - r0) < 0.01
    assert V.sqrt_perturbation_check(z, h)


def test_tau_gap_vacuous_and_zero(zero_table, const_table):
    assert V.tau_gap_check(const_table).vacuous
    assert V.tau_gap_check(zero_table).passed


def test_tau_gap_real_potential(real4):
    t = S.spectral_table(real4, -32, 32)
    res = V.tau_gap_check(t)
    assert not res.vacuous and res.passed
    assert 0 < res.C < 10
