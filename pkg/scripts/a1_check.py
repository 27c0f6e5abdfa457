"""Weighted error of the large-lambda approximant for several potentials.

Prints err * |lam|^2 at |lam| in {50, ..., 800} for Im lam in {0, 0.5} and the
max/min ratio, which stays bounded when the error decays like 1/|lam|^2.
"""

from zsspec import potential as P
from zsspec import verify as V

MAGS = (50, 100, 200, 400, 800)


def main() -> int:
    pots = {
        "single_mode(1,1)": P.single_mode(1, 1),
        "constant(1,1)": P.constant(1, 1),
        "real 4-mode": P.smooth_real_four_mode(),
        "complex 4-mode": P.complex_four_mode(),
    }
    ok = True
    for name, p in pots.items():
        for im in (0.0, 0.5):
            rep = V.a1_bound_check(p, [complex(m, im) for m in MAGS])
            ok &= rep.passed
            w = "  ".join(f"{s[2]:.3e}" for s in rep.samples)
            print(f"{name:18s} Im={im:<3g} err*|lam|^2: {w}   ratio {rep.ratio:.2f} {'PASS' if rep.passed else 'FAIL'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
