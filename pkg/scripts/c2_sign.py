"""Measure the second expansion coefficient from computed Dirichlet eigenvalues.

For phi1 = e^{2 pi i x}, phi2 = 2 e^{-2 pi i x} the residual
mu_n - n pi - c1/n is fitted to c2/n^2 + c3/n^3 over 8 <= |n| <= 64 and
compared with the series value of c2 and with (i / 4 pi^2) int phi1 phi2'.
"""

import numpy as np

from zsspec import asymptotics as A
from zsspec import potential as P
from zsspec import spectrum as S


def main() -> int:
    p = P.single_mode(1, 2)
    c = A.expansion_series(p, 3).c
    table = S.spectral_table(p, -64, 64, n_floor=8)
    rows = [r for r in table.rows if r.ok]
    n = np.array([r.n for r in rows], dtype=float)
    rho = np.array([r.mu - r.n * np.pi - c[0] / r.n for r in rows])
    fit = np.linalg.lstsq(np.stack([n**-2, n**-3], axis=1), rho, rcond=None)[0]
    integral_form = 1j / (4 * np.pi**2) * np.mean(p.grid(1) * P.derivative(p, 2, 1))
    print(f"series      c1 = {c[0].real:+.10f}  c2 = {c[1].real:+.10f}  c3 = {c[2].real:+.10f}")
    print(f"measured    c2 = {fit[0].real:+.10f}  c3 = {fit[1].real:+.10f}")
    print(f"(i/4pi^2) int phi1 phi2' = {integral_form.real:+.10f}")
    rel = abs(fit[0] - c[1]) / abs(c[1])
    agrees = abs(fit[0] - integral_form) < 0.1 * abs(integral_form)
    print(f"measured vs series: rel dev {rel:.2e}")
    print("integral form with + sign " + ("agrees" if agrees else "has the wrong sign; c2 = -(i/4pi^2) int phi1 phi2'"))
    return 0 if rel < 0.1 else 1


if __name__ == "__main__":
    raise SystemExit(main())
