"""Periodic two-component potentials stored as trigonometric polynomials.

A potential is the pair (phi1, phi2) of 1-periodic complex functions.  It is
kept simultaneously as a finite Fourier mode map and as samples on a uniform
power-of-two grid.  Fourier coefficients follow the convention

    u_hat(n) = int_0^1 u(x) exp(-2 pi i n x) dx.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

DERIVATIVE_ORDER_CAP = 8
REAL_TYPE_TOL = 1e-12


def _is_pow2(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def _clean_modes(modes: Mapping[int, complex]) -> dict[int, complex]:
    return {int(n): complex(v) for n, v in modes.items() if complex(v) != 0}


def modes_to_grid(modes: Mapping[int, complex], grid_size: int) -> np.ndarray:
    """Samples of sum_n modes[n] e^{2 pi i n x} at x_j = j / grid_size."""
    spec = np.zeros(grid_size, dtype=complex)
    for n, v in modes.items():
        spec[n % grid_size] += v
    return np.fft.ifft(spec) * grid_size


def grid_to_modes(samples: np.ndarray, K: int | None = None, tol: float = 0.0) -> dict[int, complex]:
    """Fourier coefficients of grid samples, restricted to |n| <= K."""
    m = len(samples)
    spec = np.fft.fft(samples) / m
    freqs = np.fft.fftfreq(m, d=1.0 / m).astype(int)
    out = {}
    for n, v in zip(freqs, spec):
        if K is not None and abs(n) > K:
            continue
        if abs(v) > tol:
            out[int(n)] = complex(v)
    return out


def evaluate_modes(modes: Mapping[int, complex], x: np.ndarray) -> np.ndarray:
    """Pointwise evaluation of a trigonometric polynomial at arbitrary x."""
    x = np.asarray(x, dtype=float)
    if not modes:
        return np.zeros(x.shape, dtype=complex)
    ns = np.fromiter(modes.keys(), dtype=float)
    coef = np.fromiter(modes.values(), dtype=complex)
    return np.exp(2j * np.pi * np.multiply.outer(x, ns)) @ coef


@dataclass(frozen=True)
class Potential:
    """Immutable potential (phi1, phi2) with matched mode and grid data."""

    modes1: Mapping[int, complex]
    modes2: Mapping[int, complex]
    grid1: np.ndarray = field(repr=False)
    grid2: np.ndarray = field(repr=False)
    K: int
    M: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def grid_size(self) -> int:
        return self.M

    def modes(self, component: int) -> Mapping[int, complex]:
        _check_component(component)
        return self.modes1 if component == 1 else self.modes2

    def grid(self, component: int) -> np.ndarray:
        _check_component(component)
        return self.grid1 if component == 1 else self.grid2

    def evaluate(self, component: int, x) -> np.ndarray:
        return evaluate_modes(self.modes(component), x)

    def sup_norm_bound(self) -> float:
        """Upper bound for max(|phi1|, |phi2|) from the l1 norm of the modes."""
        s1 = sum(abs(v) for v in self.modes1.values())
        s2 = sum(abs(v) for v in self.modes2.values())
        return float(max(s1, s2))

    def is_zero(self) -> bool:
        return not self.modes1 and not self.modes2

    def fingerprint(self) -> str:
        payload = json.dumps(to_json_dict(self), sort_keys=True)
        return hashlib.sha1(payload.encode()).hexdigest()[:16]

    def scaled(self, factor: complex) -> "Potential":
        return from_fourier(
            {n: factor * v for n, v in self.modes1.items()},
            {n: factor * v for n, v in self.modes2.items()},
            self.M,
        )

    def reflected_swap(self) -> "Potential":
        """The potential x -> (phi2(-x), phi1(-x))."""
        return from_fourier(
            {-n: v for n, v in self.modes2.items()},
            {-n: v for n, v in self.modes1.items()},
            self.M,
        )


def _check_component(component: int) -> None:
    if component not in (1, 2):
        raise ValueError(f"component must be 1 or 2, got {component!r}")


def from_fourier(
    modes1: Mapping[int, complex], modes2: Mapping[int, complex], grid_size: int = 64
) -> Potential:
    """Build a potential from two mode maps; grid_size must be a power of two >= 4K+4."""
    m1, m2 = _clean_modes(modes1), _clean_modes(modes2)
    K = max([abs(n) for n in (*m1, *m2)], default=0)
    if not _is_pow2(int(grid_size)):
        raise ValueError(f"grid_size must be a power of two, got {grid_size}")
    if grid_size < 4 * K + 4:
        raise ValueError(
            f"grid_size {grid_size} too small for max mode K={K}: need grid_size >= 4K+4 = {4 * K + 4}"
        )
    g1 = modes_to_grid(m1, grid_size)
    g2 = modes_to_grid(m2, grid_size)
    g1.setflags(write=False)
    g2.setflags(write=False)
    return Potential(m1, m2, g1, g2, K, int(grid_size))


def fourier_coefficient(p: Potential, component: int, n: int) -> complex:
    """Stored Fourier coefficient; zero for every absent mode, including |n| > K."""
    return complex(p.modes(component).get(int(n), 0.0))


def derivative(p: Potential, component: int, order: int, cap: int = DERIVATIVE_ORDER_CAP) -> np.ndarray:
    """Spectral derivative of one component, sampled on the potential grid."""
    if order < 0 or order > cap:
        raise ValueError(f"derivative order must lie in [0, {cap}], got {order}")
    modes = p.modes(component)
    return modes_to_grid({n: v * (2j * np.pi * n) ** order for n, v in modes.items()}, p.M)


def sobolev_norm(p: Potential, N: int) -> float:
    """Product-space H^N norm via Parseval."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    total = 0.0
    for modes in (p.modes1, p.modes2):
        for n, v in modes.items():
            w = sum((2 * np.pi * n) ** (2 * j) for j in range(N + 1))
            total += w * abs(v) ** 2
    return float(np.sqrt(total))


def is_real_type(p: Potential, tol: float = REAL_TYPE_TOL) -> bool:
    """True iff phi2 is the complex conjugate of phi1 up to tol on every mode."""
    keys = set(p.modes2) | {-n for n in p.modes1}
    dev = max(
        (abs(p.modes2.get(n, 0.0) - np.conj(p.modes1.get(-n, 0.0))) for n in keys),
        default=0.0,
    )
    return bool(dev <= tol)


def zero(grid_size: int = 64) -> Potential:
    return from_fourier({}, {}, grid_size)


def constant(a: complex, b: complex, grid_size: int = 64) -> Potential:
    return from_fourier({0: a}, {0: b}, grid_size)


def single_mode(a: complex, b: complex, grid_size: int = 64) -> Potential:
    """phi1 = a e^{2 pi i x}, phi2 = b e^{-2 pi i x}."""
    return from_fourier({1: a}, {-1: b}, grid_size)


def random_trig(
    n_modes: int,
    K: int,
    amplitude: float = 0.3,
    real_type: bool = False,
    seed: int = 0,
    grid_size: int = 64,
) -> Potential:
    """Random trig polynomial with n_modes modes per component drawn from [-K, K]."""
    rng = np.random.default_rng(seed)
    ks = np.arange(-K, K + 1)

    def draw() -> dict[int, complex]:
        idx = rng.choice(ks, size=min(n_modes, len(ks)), replace=False)
        vals = amplitude * (rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))) / np.sqrt(2)
        return {int(n): complex(v) for n, v in zip(idx, vals)}

    m1 = draw()
    m2 = {-n: np.conj(v) for n, v in m1.items()} if real_type else draw()
    return from_fourier(m1, m2, grid_size)


def smooth_real_four_mode(grid_size: int = 64) -> Potential:
    """Fixed real-type trig polynomial with modes at +-1, +-2 used by the decay suites."""
    m1 = {-2: 0.15 + 0.1j, -1: 0.25, 1: 0.2 - 0.1j, 2: 0.1j}
    return from_fourier(m1, {-n: np.conj(v) for n, v in m1.items()}, grid_size)


def complex_four_mode(grid_size: int = 64) -> Potential:
    """Fixed non-real-type trig polynomial with modes at +-1, +-2."""
    return from_fourier(
        {-2: 0.2 - 0.05j, -1: 0.1 + 0.2j, 1: -0.15j, 2: 0.1},
        {-2: 0.05 + 0.1j, -1: 0.3, 1: 0.1 - 0.1j, 2: -0.2j},
        grid_size,
    )


PRESETS = ("zero", "constant", "single_mode")


def preset(name: str, a: complex = 1.0, b: complex = 1.0, grid_size: int = 64) -> Potential:
    if name == "zero":
        return zero(grid_size)
    if name == "constant":
        return constant(a, b, grid_size)
    if name == "single_mode":
        return single_mode(a, b, grid_size)
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")


def _parse_number(v) -> complex:
    if isinstance(v, Mapping):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def from_json_dict(data: Mapping) -> Potential:
    """Parse the documented JSON layout (explicit modes or a preset)."""
    if not isinstance(data, Mapping):
        raise ValueError("potential JSON must be an object")
    grid_size = int(data.get("grid_size", 64))
    if "preset" in data:
        return preset(
            str(data["preset"]),
            _parse_number(data.get("a", 1.0)),
            _parse_number(data.get("b", 1.0)),
            grid_size,
        )
    modes = []
    for key in ("phi1", "phi2"):
        entries = data.get(key, [])
        if not isinstance(entries, list):
            raise ValueError(f"field {key!r} must be a list of mode objects")
        m: dict[int, complex] = {}
        for e in entries:
            try:
                m[int(e["n"])] = m.get(int(e["n"]), 0) + complex(float(e.get("re", 0.0)), float(e.get("im", 0.0)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"malformed mode entry in {key!r}: {e!r}") from exc
        modes.append(m)
    return from_fourier(modes[0], modes[1], grid_size)


def to_json_dict(p: Potential) -> dict:
    def enc(m):
        return [{"n": n, "re": m[n].real, "im": m[n].imag} for n in sorted(m)]

    return {"grid_size": p.M, "phi1": enc(p.modes1), "phi2": enc(p.modes2)}


def load(path: str | Path) -> Potential:
    with open(path) as fh:
        return from_json_dict(json.load(fh))
