"""Dirichlet eigenvalues, periodic eigenvalue pairs and critical points near n pi.

All root searches are batched over indices n: one evaluation of the monodromy
serves a whole vector of candidate points.  Newton is seeded by the
asymptotic predictions; failures fall back to contour integrals (winding
count plus first two moments) on a disc around n pi.

Every row also carries an a posteriori error estimate per quantity, obtained
by re-evaluating the characteristic functions on a grid with twice as many
cells and adding a rounding floor proportional to the cell count.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .monodromy import DEFAULT_TOL, cells_for, monodromy_batch
from .potential import Potential

N_FLOOR = 4
_EPS = np.finfo(float).eps
_MAX_ITER = 60


class RootError(RuntimeError):
    """A root could not be isolated in its localization window."""


def lex_leq(a: complex, b: complex) -> bool:
    """Lexicographic order: real part first, then imaginary part."""
    a, b = complex(a), complex(b)
    return a.real < b.real or (a.real == b.real and a.imag <= b.imag)


def _quantize(z: complex, tol: float) -> complex:
    if tol <= 0:
        return complex(z)
    return complex(round(z.real / tol) * tol, round(z.imag / tol) * tol)


def lex_sorted_pair(a: complex, b: complex, tol: float = 0.0) -> tuple[complex, complex]:
    if lex_leq(_quantize(a, tol), _quantize(b, tol)):
        return complex(a), complex(b)
    return complex(b), complex(a)


def window_radius(n: int) -> float:
    return max(1.0 / abs(n), 0.25) if n != 0 else 1.0


def contour_radius(n: int) -> float:
    return min(1.5, max(0.5, 2.0 / abs(n))) if n != 0 else 1.5


# ---------------------------------------------------------------- evaluation


@dataclass
class _Chars:
    D: np.ndarray  # (J, L) derivatives of Delta
    d: np.ndarray  # anti-discriminant
    chi: np.ndarray  # Dirichlet characteristic
    det: np.ndarray
    scale: np.ndarray
    F: np.ndarray  # gap function (m1 - m4)^2 + 4 m2 m3 and its derivatives
    mag: np.ndarray  # |m1 - m4| + |m2| + |m3|, sets the rounding level of F
    cells: np.ndarray

    def rounding(self) -> np.ndarray:
        """Absolute rounding level of the entries, proportional to the cell count."""
        return _EPS * self.cells * np.maximum(self.scale, 1.0)


def _chars(p: Potential, lams, order: int, tol: float, cell_factor: int = 1) -> _Chars:
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    r = monodromy_batch(p, lams, order, 1.0, tol, cell_factor)
    D = r[:, 0] + r[:, 3]
    d = r[:, 1] + r[:, 2]
    chi = (r[:, 3] + r[:, 2] - r[:, 1] - r[:, 0]) / 2j
    det = r[0, 0] * r[0, 3] - r[0, 1] * r[0, 2]
    # Delta^2 - 4 det written so that its rounding error shrinks with the gap:
    # near a closed gap M is close to +-Id and every term below is small
    dm, m2, m3 = r[:, 0] - r[:, 3], r[:, 1], r[:, 2]
    F = np.zeros_like(D)
    F[0] = dm[0] ** 2 + 4 * m2[0] * m3[0]
    if order >= 1:
        F[1] = 2 * dm[0] * dm[1] + 4 * (m2[1] * m3[0] + m2[0] * m3[1])
    if order >= 2:
        F[2] = 2 * dm[1] ** 2 + 2 * dm[0] * dm[2] + 4 * (m2[2] * m3[0] + 2 * m2[1] * m3[1] + m2[0] * m3[2])
    mag = np.abs(dm[0]) + np.abs(m2[0]) + np.abs(m3[0])
    cells = np.array([cells_for(p, z, 1.0, tol) * cell_factor for z in lams])
    return _Chars(D, d, chi, det, np.abs(r[0]).max(axis=0), F, mag, cells)


def _gap_noise(fine: _Chars, coarse: _Chars) -> np.ndarray:
    eps = coarse.rounding()
    return np.abs(fine.F[0] - coarse.F[0]) + 4 * eps * (coarse.mag + eps)


def _target(kind: str, ns: np.ndarray) -> np.ndarray:
    if kind == "periodic":
        return 2.0 * np.where(ns % 2 == 0, 1.0, -1.0)
    return np.zeros(len(ns))


def _fun(p, kind, lams, ns, tol, cell_factor=1):
    """f and f' for a root kind: 'dirichlet' (chi_D), 'critical' (Delta'), 'periodic' (Delta -+ 2)."""
    if kind == "dirichlet":
        c = _chars(p, lams, 1, tol, cell_factor)
        return c.chi[0], c.chi[1], c
    if kind == "critical":
        c = _chars(p, lams, 2, tol, cell_factor)
        return c.D[1], c.D[2], c
    c = _chars(p, lams, 1, tol, cell_factor)
    if kind == "gap":
        return c.F[0], c.F[1], c
    return c.D[0] - _target(kind, ns), c.D[1], c


def _newton(p, kind, seeds, ns, tol):
    x = np.array(seeds, dtype=complex)
    active = np.ones(len(x), dtype=bool)
    prev = np.full(len(x), np.inf)
    iters = np.zeros(len(x), dtype=int)
    for _ in range(_MAX_ITER):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        f, fp, _ = _fun(p, kind, x[idx], ns[idx], tol)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f / fp
        big = np.abs(step) > 0.5
        step[big] *= 0.5 / np.abs(step[big])
        x[idx] -= step
        iters[idx] += 1
        a = np.abs(step)
        scale = 1.0 + np.abs(x[idx])
        done = (a <= 4 * _EPS * scale) | ((a < 1e-8 * scale) & (a >= 0.9 * prev[idx])) | ~np.isfinite(a)
        prev[idx] = a
        active[idx[done]] = False
    return x, iters


def _contour(p, kind, n, center, radius, points, tol):
    """Winding count and centered moments of the zeros of f inside a circle."""
    theta = 2 * np.pi * np.arange(points) / points
    e = np.exp(1j * theta)
    z = center + radius * e
    nn = np.full(points, n)
    if kind == "periodic_count":
        c = _chars(p, z, 1, tol)
        f, fp = c.D[0] ** 2 - 4.0, 2 * c.D[0] * c.D[1]
    else:
        f, fp, _ = _fun(p, kind, z, nn, tol)
    w = fp / f * radius * e / points  # (1/2 pi i) * f'/f dz
    count = np.sum(w)
    u = z - center
    return count, np.sum(u * w), np.sum(u * u * w)


def _roots_from_moments(center, count, m1, m2):
    k = int(round(count.real))
    if k == 1:
        return [center + m1]
    if k == 2:
        e1, e2 = m1, (m1 * m1 - m2) / 2
        disc = np.sqrt(e1 * e1 - 4 * e2 + 0j)
        return [center + (e1 - disc) / 2, center + (e1 + disc) / 2]
    return []


def _points(n: int) -> int:
    return 16 if abs(n) >= N_FLOOR else 64


# winding counts are integers, so a coarse integration grid is enough
_COUNT_TOL = 1e-8


def _in_window(root, n) -> bool:
    return abs(root - n * np.pi) <= window_radius(n) * (1 + 1e-9) + 1e-12


def _single_stage(p, kind, ns, seeds, tol):
    """Locate one simple root per index; returns roots, converged flags and notes."""
    roots, _ = _newton(p, kind, seeds, ns, tol)
    f, _, _ = _fun(p, kind, roots, ns, tol)
    conv = np.abs(f) <= tol * (1 + np.abs(roots))
    conv &= np.array([_in_window(r, n) for r, n in zip(roots, ns)])
    notes = [[] for _ in ns]
    for i in np.nonzero(~conv)[0]:
        n = int(ns[i])
        center, radius = n * np.pi, contour_radius(n)
        count, m1, m2 = _contour(p, kind, n, center, radius, 256, tol)
        found = _roots_from_moments(center, count, m1, m2)
        if len(found) != 1 or abs(count - round(count.real)) > 0.1:
            notes[i].append(f"{kind}_count={count.real:.2f}")
            continue
        polished, _ = _newton(p, kind, np.array(found), np.array([n]), tol)
        fv, _, _ = _fun(p, kind, polished, np.array([n]), tol)
        roots[i] = polished[0]
        conv[i] = abs(fv[0]) <= tol * (1 + abs(polished[0])) and _in_window(polished[0], n)
        notes[i].append("contour_fallback")
    for i in np.nonzero(~conv)[0]:
        notes[i].append(f"{kind}_not_converged")
    return roots, conv, notes


def _pair_stage(p, ns, lam_dot, tol):
    """Periodic pair from the local quadratic model of the gap function at lam_dot.

    Newton runs on (m1 - m4)^2 + 4 m2 m3, which vanishes exactly where the
    Floquet multipliers coincide, instead of on Delta -+ 2; this keeps small
    gaps accurate to the rounding level rather than its square root.
    """
    c = _chars(p, lam_dot, 2, tol)
    c2 = _chars(p, lam_dot, 2, tol, 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.sqrt(-2 * c.F[0] / c.F[2] + 0j)
        u_noise = np.sqrt(2 * _gap_noise(c2, c) / np.abs(c.F[2]))
    u = np.where(np.isfinite(u), u, 0.0)
    u_noise = np.where(np.isfinite(u_noise), u_noise, np.inf)
    double = np.abs(u) <= np.maximum(4 * u_noise, tol)
    lm, lp = lam_dot.copy(), lam_dot.copy()
    split = np.nonzero(~double)[0]
    if split.size:
        seeds = np.concatenate([lam_dot[split] - u[split], lam_dot[split] + u[split]])
        nn = np.concatenate([ns[split], ns[split]])
        r, _ = _newton(p, "gap", seeds, nn, tol)
        lm[split], lp[split] = r[: split.size], r[split.size :]
    f, _, _ = _fun(p, "periodic", np.concatenate([lm, lp]), np.concatenate([ns, ns]), tol)
    L = len(ns)
    conv = (np.abs(f[:L]) <= tol * (1 + np.abs(lm))) & (np.abs(f[L:]) <= tol * (1 + np.abs(lp)))
    distinct = double | (np.abs(lp - lm) > 0.25 * np.abs(u))
    conv &= distinct
    conv &= np.array([_in_window(a, n) and _in_window(b, n) for a, b, n in zip(lm, lp, ns)])
    notes = [[] for _ in ns]
    for i in np.nonzero(~conv)[0]:
        n = int(ns[i])
        center, radius = n * np.pi, contour_radius(n)
        count, m1, m2 = _contour(p, "periodic", n, center, radius, 256, tol)
        found = _roots_from_moments(center, count, m1, m2)
        notes[i].append("contour_fallback")
        if len(found) != 2:
            notes[i].append(f"periodic_count={count.real:.2f}")
            continue
        a, b = found
        if abs(a - b) > np.sqrt(tol):
            r, _ = _newton(p, "gap", np.array([a, b]), np.array([n, n]), tol)
            a, b = r
            double[i] = False
        else:
            a = b = lam_dot[i]
            double[i] = True
        fv, _, _ = _fun(p, "periodic", np.array([a, b]), np.array([n, n]), tol)
        lm[i], lp[i] = a, b
        conv[i] = bool(np.all(np.abs(fv) <= tol * (1 + abs(a)))) and _in_window(a, n) and _in_window(b, n)
    for i in range(L):
        lm[i], lp[i] = lex_sorted_pair(lm[i], lp[i], tol)
    for i in np.nonzero(~conv)[0]:
        notes[i].append("periodic_not_converged")
    return lm, lp, conv, double, u, u_noise, notes


def _winding_counts(p, ns, tol):
    out = np.zeros(len(ns), dtype=int)
    for P in sorted({_points(int(n)) for n in ns}):
        sel = np.array([_points(int(n)) == P for n in ns])
        idx = np.nonzero(sel)[0]
        theta = 2 * np.pi * np.arange(P) / P
        e = np.exp(1j * theta)
        radii = np.array([contour_radius(int(n)) for n in ns[idx]])
        z = (ns[idx] * np.pi)[:, None] + radii[:, None] * e[None, :]
        c = _chars(p, z.reshape(-1), 1, max(tol, _COUNT_TOL))
        f = c.D[0] ** 2 - 4.0
        fp = 2 * c.D[0] * c.D[1]
        w = (fp / f).reshape(len(idx), P) * radii[:, None] * e[None, :] / P
        out[idx] = np.round(np.sum(w, axis=1).real).astype(int)
    return out


# ---------------------------------------------------------------- public API


def _seed_base(p: Potential, ns: np.ndarray, series=None):
    from .asymptotics import expansion_series

    if series is None:
        try:
            series = expansion_series(p, 2)
        except ValueError:
            return ns * np.pi + 0j
    return np.array([n * np.pi + series.tail(int(n)) for n in ns])


def _mu_seeds(p, ns, base):
    f1 = np.array([p.modes1.get(-int(n), 0.0) for n in ns])
    f2 = np.array([p.modes2.get(int(n), 0.0) for n in ns])
    return base + 0.5 * (f1 + f2)


def _check_n(n: int) -> None:
    if n == 0:
        raise ValueError("index n = 0 has no localization window")


def dirichlet_eigenvalue(p: Potential, n: int, tol: float = DEFAULT_TOL) -> complex:
    """mu_n: the zero of chi_D in the window around n pi."""
    _check_n(n)
    ns = np.array([int(n)])
    roots, conv, notes = _single_stage(p, "dirichlet", ns, _mu_seeds(p, ns, _seed_base(p, ns)), tol)
    if not conv[0]:
        raise RootError(f"Dirichlet eigenvalue n={n}: {', '.join(notes[0])}")
    return complex(roots[0])


def critical_point(p: Potential, n: int, tol: float = DEFAULT_TOL) -> complex:
    """lam_dot_n: the zero of Delta' in the window around n pi."""
    _check_n(n)
    ns = np.array([int(n)])
    roots, conv, notes = _single_stage(p, "critical", ns, _seed_base(p, ns), tol)
    if not conv[0]:
        raise RootError(f"critical point n={n}: {', '.join(notes[0])}")
    return complex(roots[0])


def periodic_pair(p: Potential, n: int, tol: float = DEFAULT_TOL) -> tuple[complex, complex]:
    """(lam_n^-, lam_n^+) in lexicographic order, counted with multiplicity."""
    _check_n(n)
    ns = np.array([int(n)])
    dot, conv_d, notes_d = _single_stage(p, "critical", ns, _seed_base(p, ns), tol)
    lm, lp, conv, _, _, _, notes = _pair_stage(p, ns, dot, tol)
    wc = _winding_counts(p, ns, tol)[0]
    if not conv[0] or wc != 2:
        raise RootError(f"periodic pair n={n}: winding={wc}, {', '.join(notes_d[0] + notes[0])}")
    return complex(lm[0]), complex(lp[0])


def _kappa_value(D, d, n):
    w = (-1) ** (int(n) % 2) * (D + d) / 2
    return 2 * np.log(w + 0j), bool(w.real > 0)


def kappa(p: Potential, n: int, tol: float = DEFAULT_TOL) -> complex:
    """kappa_n = 2 log((-1)^n (Delta(mu_n) + delta(mu_n)) / 2), principal branch."""
    mu = dirichlet_eigenvalue(p, n, tol)
    c = _chars(p, [mu], 0, tol)
    val, ok = _kappa_value(c.D[0, 0], c.d[0, 0], n)
    if not ok:
        raise RootError(f"kappa n={n}: multiplier in the left half-plane, principal log undefined")
    return complex(val)


_QUANTITIES = ("mu", "lam_minus", "lam_plus", "lam_dot", "gamma", "tau", "kappa", "Delta_at_mu", "delta_at_mu")
_RESIDUALS = ("chi_D", "Ddot", "periodic", "floquet", "det")


@dataclass(frozen=True)
class SpectralRow:
    n: int
    mu: complex
    lam_minus: complex
    lam_plus: complex
    lam_dot: complex
    gamma: complex
    tau: complex
    kappa: complex
    Delta_at_mu: complex
    delta_at_mu: complex
    conv_mu: bool
    conv_dot: bool
    conv_pm: bool
    double: bool
    winding: int
    res: dict = field(default_factory=dict)
    err: dict = field(default_factory=dict)
    flags: tuple = ()

    @property
    def ok(self) -> bool:
        return self.conv_mu and self.conv_dot and self.conv_pm and not self.flags

    def roots(self) -> tuple[complex, ...]:
        return (self.mu, self.lam_dot, self.lam_minus, self.lam_plus)


@dataclass(frozen=True)
class SpectralTable:
    rows: tuple
    fingerprint: str
    settings: dict
    potential: Potential | None = field(default=None, repr=False, compare=False)

    def by_n(self, n: int) -> SpectralRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def errors(self, name: str) -> np.ndarray:
        return np.array([r.err.get(name, np.nan) for r in self.rows])

    def all_converged(self) -> bool:
        return all(r.ok for r in self.rows)

    def localization_index(self) -> int | None:
        return localization_index(self)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["n"]
        for q in _QUANTITIES:
            header += [f"{q}_re", f"{q}_im"]
        header += [f"res_{k}" for k in _RESIDUALS] + [f"err_{q}" for q in _QUANTITIES]
        header += ["conv_mu", "conv_dot", "conv_pm", "double", "winding", "flags"]
        w.writerow(header)
        for r in self.rows:
            line = [r.n]
            for q in _QUANTITIES:
                v = complex(getattr(r, q))
                line += [repr(v.real), repr(v.imag)]
            line += [repr(float(r.res.get(k, np.nan))) for k in _RESIDUALS]
            line += [repr(float(r.err.get(q, np.nan))) for q in _QUANTITIES]
            line += [int(r.conv_mu), int(r.conv_dot), int(r.conv_pm), int(r.double), r.winding, ";".join(r.flags)]
            w.writerow(line)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_json_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            if isinstance(v, (tuple, list)):
                return [enc(x) for x in v]
            if isinstance(v, (np.floating, np.integer, np.bool_)):
                return v.item()
            return v

        return {
            "fingerprint": self.fingerprint,
            "settings": self.settings,
            "rows": [enc(asdict(r)) for r in self.rows],
        }


def _noise(f2, f1, scale, cells):
    return np.abs(f2 - f1) + _EPS * cells * np.maximum(scale, 1.0)


def _rows_block(p: Potential, ns: np.ndarray, tol: float, series) -> list[SpectralRow]:
    base = _seed_base(p, ns, series)
    L = len(ns)
    mu, conv_mu, notes_mu = _single_stage(p, "dirichlet", ns, _mu_seeds(p, ns, base), tol)
    dot, conv_dot, notes_dot = _single_stage(p, "critical", ns, base, tol)
    lm, lp, conv_pm, double, u, u_noise, notes_pm = _pair_stage(p, ns, dot, tol)
    wind = _winding_counts(p, ns, tol)
    cells = np.array([cells_for(p, z, 1.0, tol) for z in mu])
    cells_dot = np.array([cells_for(p, z, 1.0, tol) for z in dot])

    # values and refined-grid values at the roots
    cm, cm2 = _chars(p, mu, 1, tol), _chars(p, mu, 1, tol, 2)
    cd, cd2 = _chars(p, dot, 2, tol), _chars(p, dot, 2, tol, 2)
    both = np.concatenate([lm, lp])
    cp, cp2 = _chars(p, both, 1, tol), _chars(p, both, 1, tol, 2)
    tgt = _target("periodic", ns)

    e_mu = _noise(cm2.chi[0], cm.chi[0], cm.scale, cells) / np.abs(cm.chi[1])
    e_dot = _noise(cd2.D[1], cd.D[1], cd.scale, cells_dot) / np.abs(cd.D[2])
    with np.errstate(divide="ignore", invalid="ignore"):
        e_root = _gap_noise(cp2, cp) / np.abs(cp.F[1])
    half_gap = np.abs(u) + u_noise
    e_lm = np.where(double, half_gap, e_root[:L])
    e_lp = np.where(double, half_gap, e_root[L:])
    e_tau = np.where(double, e_dot + half_gap**2, 0.5 * (e_root[:L] + e_root[L:]))
    D_mu, d_mu = cm.D[0], cm.d[0]
    e_D = _noise(cm2.D[0], cm.D[0], cm.scale, cells) + np.abs(cm.D[1]) * e_mu
    e_d = _noise(cm2.d[0], cm.d[0], cm.scale, cells) + np.abs(cm.d[1]) * e_mu

    rows = []
    for i, n in enumerate(ns):
        n = int(n)
        flags = list(notes_mu[i] + notes_dot[i] + notes_pm[i])
        if wind[i] != 2:
            flags.append(f"winding={wind[i]}")
        kap, kap_ok = _kappa_value(D_mu[i], d_mu[i], n)
        if not kap_ok:
            flags.append("kappa_branch")
        wmag = abs((D_mu[i] + d_mu[i]) / 2)
        gamma = lp[i] - lm[i]
        tau = (lp[i] + lm[i]) / 2
        res = {
            "chi_D": float(abs(cm.chi[0, i])),
            "Ddot": float(abs(cd.D[1, i])),
            "periodic": float(max(abs(cp.D[0, i] - tgt[i]), abs(cp.D[0, L + i] - tgt[i]))),
            "floquet": float(abs(D_mu[i] ** 2 - d_mu[i] ** 2 - 4)),
            "det": float(max(abs(cm.det[i] - 1), abs(cd.det[i] - 1), abs(cp.det[i] - 1), abs(cp.det[L + i] - 1))),
        }
        err = {
            "mu": float(e_mu[i]),
            "lam_dot": float(e_dot[i]),
            "lam_minus": float(e_lm[i]),
            "lam_plus": float(e_lp[i]),
            "gamma": float(e_lm[i] + e_lp[i]),
            "tau": float(e_tau[i]),
            "Delta_at_mu": float(e_D[i]),
            "delta_at_mu": float(e_d[i]),
            "kappa": float((e_D[i] + e_d[i]) / max(wmag, 1e-300)),
        }
        rows.append(
            SpectralRow(
                n=n,
                mu=complex(mu[i]),
                lam_minus=complex(lm[i]),
                lam_plus=complex(lp[i]),
                lam_dot=complex(dot[i]),
                gamma=complex(gamma),
                tau=complex(tau),
                kappa=complex(kap),
                Delta_at_mu=complex(D_mu[i]),
                delta_at_mu=complex(d_mu[i]),
                conv_mu=bool(conv_mu[i]),
                conv_dot=bool(conv_dot[i]),
                conv_pm=bool(conv_pm[i]),
                double=bool(double[i]),
                winding=int(wind[i]),
                res=res,
                err=err,
                flags=tuple(flags),
            )
        )
    return rows


def spectral_table(
    p: Potential,
    n_min: int,
    n_max: int,
    tol: float = DEFAULT_TOL,
    n_floor: int = N_FLOOR,
    series=None,
    workers: int | None = None,
    block: int = 16,
) -> SpectralTable:
    """All spectral quantities for n_min <= n <= n_max with |n| >= n_floor."""
    if n_min > n_max:
        raise ValueError(f"n_min={n_min} exceeds n_max={n_max}")
    if n_floor < 1:
        raise ValueError("n_floor must be at least 1")
    ns = np.array([n for n in range(n_min, n_max + 1) if abs(n) >= n_floor])
    if ns.size == 0:
        raise ValueError(f"no indices with |n| >= {n_floor} in [{n_min}, {n_max}]")
    if series is None:
        from .asymptotics import expansion_series

        try:
            series = expansion_series(p, 2)
        except ValueError:
            series = None
    order = np.argsort(np.abs(ns), kind="stable")
    blocks = [np.sort(ns[order[i : i + block]]) for i in range(0, ns.size, block)]
    if workers is None:
        workers = int(os.environ.get("ZS_THREADS", "1") or 1)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda b: _rows_block(p, b, tol, series), blocks))
    else:
        parts = [_rows_block(p, b, tol, series) for b in blocks]
    rows = sorted((r for part in parts for r in part), key=lambda r: r.n)
    settings = {"tol": tol, "n_floor": n_floor, "n_min": n_min, "n_max": n_max, "integrator": "magnus6"}
    return SpectralTable(tuple(rows), p.fingerprint(), settings, p)


def localization_index(table: SpectralTable) -> int | None:
    """Smallest n_B with every root of every row |n| >= n_B inside |lam - n pi| <= 1/|n|."""
    bad = [abs(r.n) for r in table.rows if any(abs(z - r.n * np.pi) > 1.0 / abs(r.n) for z in r.roots())]
    largest = max(abs(r.n) for r in table.rows)
    if not bad:
        return min(abs(r.n) for r in table.rows)
    nb = max(bad) + 1
    return nb if nb <= largest else None
