"""Residual-decay reports and property checks for the asymptotic estimates.

A decay report compares a computed spectral column with its closed-form
prediction and asks whether the residual decays at least like |n|^-p.

Each residual is judged against the per-row error estimate from the spectral
table.  Only residuals clearly above that estimate ("resolved") enter the
log-log slope fit.  For trigonometric-polynomial potentials several residual
sequences drop below double-precision resolution after a few indices.  A
report with too few resolved points is marked floor_limited instead of being
fitted to rounding noise.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import monodromy as mono
from .asymptotics import THEOREMS, ExpansionSeries, decay_power, match_set_prediction, predict
from .potential import Potential
from .spectrum import SpectralTable

SLOPE_SLACK = 0.3
FIT_MIN_N = 8
RESOLVE_FACTOR = 8.0
ABS_FLOOR = 1e-14
MIN_FIT_POINTS = 3
# a floor-limited report only counts as passing if the error floor itself is small
FLOOR_PASS_MAX_ERR = 1e-5
MIN_ROWS = 8


@dataclass(frozen=True)
class ResidualReport:
    theorem: str
    N: int
    power: float
    n_range: tuple
    ns: np.ndarray
    residuals: np.ndarray
    errors: np.ndarray
    weighted: np.ndarray
    resolved: np.ndarray
    sup_weighted: float
    slope: float
    floor_limited: bool
    passed: bool
    slope_slack: float
    settings: dict = field(default_factory=dict)

    @property
    def n_resolved(self) -> int:
        return int(np.count_nonzero(self.resolved))

    def summary(self) -> str:
        if self.floor_limited:
            tail = f"floor-limited ({self.n_resolved} resolved, max err {np.max(self.errors):.1e})"
        else:
            tail = f"slope {self.slope:+.2f} vs required <= {-self.power + self.slope_slack:+.2f}"
        status = "PASS" if self.passed else "FAIL"
        return f"{status} thm {self.theorem} N={self.N} p={self.power:g}: {tail}, sup weighted {self.sup_weighted:.3e}"

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "N": self.N,
            "decay_power": self.power,
            "n_range": list(self.n_range),
            "sup_weighted": self.sup_weighted,
            "slope": None if not np.isfinite(self.slope) else self.slope,
            "floor_limited": self.floor_limited,
            "n_resolved": self.n_resolved,
            "pass": self.passed,
            "slope_slack": self.slope_slack,
            "settings": self.settings,
            "residuals": [
                {"n": int(n), "re": float(r.real), "im": float(r.imag), "err": float(e), "weighted": float(w), "resolved": bool(s)}
                for n, r, e, w, s in zip(self.ns, self.residuals, self.errors, self.weighted, self.resolved)
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "residual_re", "residual_im", "weighted", "error_estimate", "resolved"])
        for n, r, e, wt, s in zip(self.ns, self.residuals, self.errors, self.weighted, self.resolved):
            w.writerow([int(n), repr(float(r.real)), repr(float(r.imag)), repr(float(wt)), repr(float(e)), int(s)])
        return buf.getvalue()


def _row_residual(theorem: str, row, pred_values) -> tuple[complex, float]:
    e = row.err
    if theorem == "1.1":
        return row.mu - pred_values[0], e["mu"]
    if theorem == "1.2i":
        _, res = match_set_prediction((row.lam_minus, row.lam_plus), pred_values)
        return max(res, key=abs), max(e["lam_minus"], e["lam_plus"])
    if theorem == "1.2ii":
        res = (row.lam_minus - pred_values[0], row.lam_plus - pred_values[1])
        return max(res, key=abs), max(e["lam_minus"], e["lam_plus"])
    if theorem == "1.3i":
        return min((row.gamma - v for v in pred_values), key=abs), e["gamma"]
    if theorem == "1.3ii":
        return row.gamma - pred_values[0], e["gamma"]
    if theorem == "1.4i":
        return row.lam_dot - pred_values[0], e["lam_dot"]
    if theorem == "1.4ii":
        return row.tau - pred_values[0], e["tau"]
    if theorem == "1.5i":
        return row.Delta_at_mu - pred_values[0], e["Delta_at_mu"]
    if theorem == "1.5ii":
        return row.delta_at_mu - pred_values[0], e["delta_at_mu"]
    if theorem == "4.1":
        return row.kappa - pred_values[0], e["kappa"]
    raise ValueError(f"unknown theorem tag {theorem!r}")


def residual_report(
    table: SpectralTable,
    series: ExpansionSeries,
    theorem: str,
    slope_slack: float = SLOPE_SLACK,
    potential: Potential | None = None,
    predictions: dict | None = None,
    fit_min_n: int = FIT_MIN_N,
    resolve_factor: float = RESOLVE_FACTOR,
) -> ResidualReport:
    """Residual decay report for one theorem over the converged rows of a table.

    predictions, if given, maps n to the tuple of predicted values and
    overrides the closed-form predictor.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem tag {theorem!r}")
    p = potential if potential is not None else table.potential
    if p is None and predictions is None:
        raise ValueError("residual_report needs the potential (table.potential or potential=)")
    rows = [r for r in table.rows if r.ok]
    if len(rows) < MIN_ROWS:
        raise ValueError(f"only {len(rows)} converged rows; at least {MIN_ROWS} are required")
    power = decay_power(theorem, series.N)
    ns, res, errs = [], [], []
    for r in rows:
        vals = predictions[r.n] if predictions is not None else predict(p, series, theorem, r.n).values
        v, e = _row_residual(theorem, r, vals)
        ns.append(r.n)
        res.append(complex(v))
        errs.append(float(e))
    ns = np.array(ns)
    res = np.array(res)
    errs = np.array(errs)
    absn = np.abs(ns).astype(float)
    weighted = np.abs(res) * absn**power
    resolved = (np.abs(res) > np.maximum(ABS_FLOOR, resolve_factor * errs)) & (absn >= fit_min_n)
    if np.count_nonzero(resolved) >= MIN_FIT_POINTS:
        slope = float(np.polyfit(np.log(absn[resolved]), np.log(np.abs(res[resolved])), 1)[0])
        sup = float(np.max(weighted[resolved]))
        floor_limited = False
        passed = bool(np.isfinite(sup) and slope <= -power + slope_slack)
    else:
        slope = float("nan")
        sup = float(np.max(weighted[resolved])) if resolved.any() else 0.0
        floor_limited = True
        passed = bool(np.max(errs[absn >= fit_min_n], initial=0.0) <= FLOOR_PASS_MAX_ERR)
    settings = {
        "resolve_factor": resolve_factor,
        "fit_min_n": fit_min_n,
        "abs_floor": ABS_FLOOR,
        "table": table.settings,
        "fingerprint": table.fingerprint,
    }
    return ResidualReport(
        theorem, series.N, power, (int(ns.min()), int(ns.max())), ns, res, errs, weighted,
        resolved, sup, slope, floor_limited, passed, slope_slack, settings,
    )


@dataclass(frozen=True)
class A1Report:
    sup_weighted: float
    ratio: float
    samples: tuple  # (lam, err, err * |lam|^2)

    @property
    def passed(self) -> bool:
        return bool(self.ratio <= 4.0)


def a1_bound_check(p: Potential, lambda_samples, tol: float = mono.DEFAULT_TOL) -> A1Report:
    """Weighted error |M - approximant| e^{-|Im lam|} |lam|^2 of the large-lam approximant at x = 1."""
    samples = []
    for lam in lambda_samples:
        lam = complex(lam)
        if abs(lam) < 10:
            raise ValueError(f"a1_bound_check requires |lam| >= 10, got {lam}")
        M = mono.fundamental_matrix(p, 1.0, lam, tol)
        A = mono.approx_monodromy_a1(p, 1.0, lam)
        err = (M - A).norm() / np.exp(abs(lam.imag))
        samples.append((lam, err, err * abs(lam) ** 2))
    w = np.array([s[2] for s in samples])
    positive = w[w > 0]
    ratio = float(positive.max() / positive.min()) if positive.size else 1.0
    return A1Report(float(w.max(initial=0.0)), ratio, tuple(samples))


def _bracket(n: int) -> float:
    return float(max(1, abs(n)))


def _phi_at_one(modes: dict, xi: float) -> complex:
    """int_0^1 e^{i xi (1 - 2t)} f(t) dt for f = sum_m f_m e^{2 pi i m t}."""
    total = 0j
    for m, v in modes.items():
        w = 2 * np.pi * m - 2 * xi
        integral = 1.0 if w == 0 else np.expm1(1j * w) / (1j * w)
        total += v * np.exp(1j * xi) * integral
    return total


@dataclass(frozen=True)
class B1Result:
    weighted_sum: float
    bound: float
    a: float

    @property
    def holds(self) -> bool:
        return bool(self.weighted_sum <= self.bound)


def lemma_b1_check(f, a: float, alpha=None, n_max: int = 400) -> B1Result:
    """Perturbed Fourier coefficient bound sum <n>^2 |phi_n(1) - (-1)^n f_hat(n)|^2 <= e^{2a} ||f||^2.

    f is a grid function (samples on a uniform periodic grid) or a mode map.
    alpha(n) gives the perturbation of xi_n = n pi + alpha_n; the default is
    alpha_n = a / <n> with <n> = max(1, |n|).
    """
    if isinstance(f, dict):
        modes = {int(k): complex(v) for k, v in f.items()}
    else:
        samples = np.asarray(f, dtype=complex)
        spec = np.fft.fft(samples) / len(samples)
        freqs = np.fft.fftfreq(len(samples), d=1.0 / len(samples)).astype(int)
        modes = {int(k): complex(v) for k, v in zip(freqs, spec) if abs(v) > 0}
    if alpha is None:
        alpha = lambda n: a / _bracket(n)  # noqa: E731
    total = 0.0
    for n in range(-n_max, n_max + 1):
        al = alpha(n)
        if abs(al) > a / _bracket(n) * (1 + 1e-12):
            raise ValueError(f"|alpha_{n}| exceeds a/<n>")
        xi = n * np.pi + al
        diff = _phi_at_one(modes, xi) - (-1) ** (n % 2) * modes.get(n, 0.0)
        total += _bracket(n) ** 2 * abs(diff) ** 2
    norm2 = sum(abs(v) ** 2 for v in modes.values())
    return B1Result(float(total), float(np.exp(2 * a) * norm2), float(a))


def branch_sqrt(z: complex, h: complex) -> tuple[complex, complex]:
    """(sqrt z, sqrt(z + h)) with the second root continued from the first along z + t h."""
    r = np.sqrt(complex(z))
    return r, r * np.sqrt(1 + complex(h) / complex(z))


def sqrt_perturbation_check(z: complex, h: complex) -> bool:
    """Both square-root perturbation bounds for |h| <= |z|/2 on the continued branch."""
    z, h = complex(z), complex(h)
    if z == 0:
        raise ValueError("z must be nonzero")
    if abs(h) > abs(z) / 2 * (1 + 1e-15):
        raise ValueError("precondition |h| <= |z|/2 violated")
    r0, r1 = branch_sqrt(z, h)
    d = abs(r1 - r0)
    slack = 1e-15 * (1 + abs(r0))
    return bool(d <= abs(h) / np.sqrt(2 * abs(z)) + slack and d <= np.sqrt(abs(h)) / 2 + slack)


@dataclass(frozen=True)
class TauGapResult:
    C: float
    passed: bool
    vacuous: bool
    rows: tuple  # (n, |tau - lam_dot|, |gamma|^2)


def tau_gap_check(table: SpectralTable, factor: float = 3.0, noise: float = 1e-10) -> TauGapResult:
    """Fit |tau_n - lam_dot_n| = C |gamma_n|^2 over rows with a nonzero gap.

    Passes iff no row exceeds factor * C |gamma_n|^2 by more than the noise level.
    """
    data = [
        (r.n, abs(r.tau - r.lam_dot), abs(r.gamma) ** 2, r.err.get("tau", 0.0) + r.err.get("lam_dot", 0.0))
        for r in table.rows
        if r.ok and not r.double and abs(r.gamma) > 0
    ]
    if not data:
        return TauGapResult(0.0, True, True, ())
    d = np.array([x[1] for x in data])
    g2 = np.array([x[2] for x in data])
    e = np.array([x[3] for x in data])
    C = float(np.dot(d, g2) / np.dot(g2, g2))
    ok = bool(np.all(d <= factor * C * g2 + np.maximum(noise, 4 * e)))
    return TauGapResult(C, ok, False, tuple((n, a, b) for n, a, b, _ in data))


def report_to_json(report: ResidualReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2)
