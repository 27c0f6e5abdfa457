"""WKB coefficient recursions and the integrals that drive the spectral expansions.

    r_1 = -phi2,  r_2 = r_1',  r_{n+1} = r_n' + phi1 * sum_{k=1}^{n-1} r_k r_{n-k}
    s_1 = -phi1,  s_2 = -s_1', s_{n+1} = -s_n' + phi2 * sum_{k=1}^{n-1} s_k s_{n-k}

    I_k = int_0^1 phi1 r_k,   J_k = int_0^1 phi2 s_k

The bandwidth of r_k grows with k, so every grid function is carried on a
working grid large enough to hold all products without aliasing.  Products
are then exact and the periodic-grid mean is an exact quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import Potential, modes_to_grid

WKB_ORDER_CAP = 8
VANISHING_TOL = 1e-8


@dataclass(frozen=True)
class WkbTable:
    N: int
    r: tuple  # r[k-1] is r_k sampled on the working grid, k = 1..N+1
    s: tuple
    I: np.ndarray  # I[k-1] = I_k
    J: np.ndarray
    grid_size: int


def _bandwidths(K: int, count: int) -> list[int]:
    B = [K, K]
    while len(B) < count:
        n = len(B)  # computing B_{n+1}
        conv = max(B[k - 1] + B[n - k - 1] for k in range(1, n))
        B.append(max(B[-1], K + conv))
    return B[:count]


def working_grid_size(p: Potential, N: int) -> int:
    B = _bandwidths(p.K, N + 1)
    need = max(p.M, 2 * (p.K + max(B)) + 2)
    return 1 << int(np.ceil(np.log2(need)))


def _deriv(f: np.ndarray) -> np.ndarray:
    m = len(f)
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        k[m // 2] = 0.0
    return np.fft.ifft(2j * np.pi * k * np.fft.fft(f))


def _recursion(first: np.ndarray, partner: np.ndarray, sign: float, count: int) -> list[np.ndarray]:
    out = [first, sign * _deriv(first)]
    while len(out) < count:
        n = len(out)
        conv = sum(out[k - 1] * out[n - k - 1] for k in range(1, n))
        out.append(sign * _deriv(out[-1]) + partner * conv)
    return out[:count]


def wkb_coefficients(p: Potential, N: int) -> WkbTable:
    if not 1 <= N <= WKB_ORDER_CAP:
        raise ValueError(f"N must lie in [1, {WKB_ORDER_CAP}], got {N}")
    m = working_grid_size(p, N)
    f1 = modes_to_grid(p.modes1, m)
    f2 = modes_to_grid(p.modes2, m)
    r = _recursion(-f2, f1, +1.0, N + 1)
    s = _recursion(-f1, f2, -1.0, N + 1)
    I = np.array([np.mean(f1 * rk) for rk in r])
    J = np.array([np.mean(f2 * sk) for sk in s])
    return WkbTable(N, tuple(r), tuple(s), I, J, m)


def vanishing_defect(t: WkbTable) -> float:
    """max_k |I_k - J_k|; zero in exact arithmetic."""
    return float(np.max(np.abs(t.I - t.J)))


def theta_n(t: WkbTable, lam: complex) -> complex:
    """theta_N(lam) = lam + i sum_{k=1}^{N} I_k / (2 i lam)^k."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("theta_n requires lam != 0")
    return lam + 1j * sum(t.I[k - 1] / (2j * lam) ** k for k in range(1, t.N + 1))
