"""Expansion coefficients c_k and closed-form predictions of spectral quantities.

The coefficients solve zeta(z) + F(z / (pi + z zeta(z))) = 0 as a truncated
power series, where F(z) = i sum_k I_k (z / 2i)^k and I_k are the WKB
integrals.  Writing zeta(z) = sum_k c_k z^k, every large-index spectral
quantity is predicted as n pi + sum_k c_k / n^k plus a Fourier term.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .potential import Potential, fourier_coefficient, is_real_type
from .wkb import wkb_coefficients

# tag -> (description, decay power offset added to N)
THEOREMS: dict[str, tuple[str, float]] = {
    "1.1": ("dirichlet eigenvalue mu_n", 1.0),
    "1.2i": ("periodic pair as a set", 0.5),
    "1.2ii": ("periodic pair, real type", 1.0),
    "1.3i": ("gap length, complex", 0.5),
    "1.3ii": ("gap length, real type", 1.0),
    "1.4i": ("critical point lam_dot_n", 1.0),
    "1.4ii": ("gap midpoint tau_n", 1.0),
    "1.5i": ("discriminant at mu_n", 1.0),
    "1.5ii": ("anti-discriminant at mu_n", 1.0),
    "4.1": ("norming constant kappa_n", 1.0),
}
REAL_TYPE_ONLY = ("1.2ii", "1.3ii")


def decay_power(theorem: str, N: int) -> float:
    _check_tag(theorem)
    return N + THEOREMS[theorem][1]


def _check_tag(theorem: str) -> None:
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem tag {theorem!r}; expected one of {sorted(THEOREMS)}")


# ---------------------------------------------------------------- power series
# A series is a coefficient array [a_0, a_1, ..., a_T].


def ps_mul(a: np.ndarray, b: np.ndarray, T: int) -> np.ndarray:
    return np.convolve(a[: T + 1], b[: T + 1])[: T + 1]


def ps_inv(a: np.ndarray, T: int) -> np.ndarray:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no reciprocal")
    out = np.zeros(T + 1, dtype=complex)
    out[0] = 1 / a[0]
    for k in range(1, T + 1):
        acc = sum(a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        out[k] = -acc / a[0]
    return out


def ps_compose(f: np.ndarray, w: np.ndarray, T: int) -> np.ndarray:
    """f(w(z)) for polynomial f and series w with w(0) = 0."""
    if w[0] != 0:
        raise ValueError("inner series must vanish at 0")
    out = np.zeros(T + 1, dtype=complex)
    for c in f[::-1]:
        out = ps_mul(out, w, T)
        out[0] += c
    return out


@dataclass(frozen=True)
class ExpansionSeries:
    N: int
    c: np.ndarray  # c[k-1] = c_k, k = 1..N+1
    I: np.ndarray
    provenance: dict = field(default_factory=dict)

    def tail(self, n: int) -> complex:
        """sum_{k=1}^{N+1} c_k / n^k evaluated at the integer n."""
        return complex(sum(ck / n ** (k + 1) for k, ck in enumerate(self.c)))


def marchenko_coefficients(I) -> ExpansionSeries:
    I = np.asarray(I, dtype=complex)
    T = len(I)
    F = np.zeros(T + 1, dtype=complex)
    for k in range(1, T + 1):
        F[k] = 1j * I[k - 1] / (2j) ** k
    zeta = np.zeros(T + 1, dtype=complex)
    z = np.zeros(T + 1, dtype=complex)
    z[1] = 1.0
    for _ in range(T + 1):
        denom = ps_mul(z, zeta, T)
        denom[0] += np.pi
        w = ps_mul(z, ps_inv(denom, T), T)
        zeta = -ps_compose(F, w, T)
    return ExpansionSeries(T - 1, zeta[1:].copy(), I.copy(), {"method": "truncated fixed point", "order": T})


def expansion_series(p: Potential, N: int) -> ExpansionSeries:
    t = wkb_coefficients(p, N)
    s = marchenko_coefficients(t.I)
    return ExpansionSeries(N, s.c, s.I, {**s.provenance, "potential": p.fingerprint(), "wkb_grid": t.grid_size})


@dataclass(frozen=True)
class Prediction:
    theorem: str
    n: int
    values: tuple
    power: float


def predict(p: Potential, series: ExpansionSeries, theorem: str, n: int) -> Prediction:
    _check_tag(theorem)
    n = int(n)
    if n == 0:
        raise ValueError("predictions require |n| >= 1")
    if theorem in REAL_TYPE_ONLY and not is_real_type(p):
        raise ValueError(f"theorem {theorem} applies to real-type potentials only")
    f1 = fourier_coefficient(p, 1, -n)
    f2 = fourier_coefficient(p, 2, n)
    base = n * np.pi + series.tail(n)
    sign = -1.0 if n % 2 else 1.0
    if theorem == "1.1":
        vals = (base + 0.5 * (f1 + f2),)
    elif theorem == "1.2i":
        r = cmath.sqrt(f1 * f2)
        vals = (base + r, base - r)
    elif theorem == "1.2ii":
        r = abs(f1)
        vals = (base - r, base + r)
    elif theorem == "1.3i":
        r = 2 * cmath.sqrt(f1 * f2)
        vals = (r, -r)
    elif theorem == "1.3ii":
        vals = (complex(2 * abs(f1)),)
    elif theorem in ("1.4i", "1.4ii"):
        vals = (base,)
    elif theorem == "1.5i":
        vals = (complex(2 * sign),)
    elif theorem == "1.5ii":
        vals = (1j * sign * (f1 - f2),)
    else:  # 4.1
        vals = (1j * (f1 - f2),)
    return Prediction(theorem, n, tuple(complex(v) for v in vals), decay_power(theorem, series.N))


def match_set_prediction(computed_pair, predicted_pair):
    """Pair two computed values with two predicted ones, minimizing the max residual.

    Returns (assignment, residuals) with residuals[i] = computed[i] - predicted[assignment[i]].
    """
    c0, c1 = (complex(v) for v in computed_pair)
    p0, p1 = (complex(v) for v in predicted_pair)
    keep = (c0 - p0, c1 - p1)
    swap = (c0 - p1, c1 - p0)
    if max(abs(swap[0]), abs(swap[1])) < max(abs(keep[0]), abs(keep[1])):
        return (1, 0), swap
    return (0, 1), keep
