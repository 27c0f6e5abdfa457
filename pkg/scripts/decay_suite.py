"""Residual decay reports for every theorem tag on the reference potentials.

Each potential is also sampled at scales 0.5 and 1.5 to probe uniformity over
a bounded set.  Writes one JSON file with all reports and prints a summary.

    python scripts/decay_suite.py [--out decay_suite.json] [--nmax 128]
"""

import argparse
import json
import time

from zsspec import asymptotics as A
from zsspec import potential as P
from zsspec import spectrum as S
from zsspec import verify as V

REAL_TAGS = ["1.1", "1.2ii", "1.3ii", "1.4i", "1.4ii", "1.5i", "1.5ii", "4.1"]
COMPLEX_TAGS = ["1.1", "1.2i", "1.3i", "1.4i", "1.4ii", "1.5i", "1.5ii", "4.1"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="decay_suite.json")
    ap.add_argument("--nmax", type=int, default=128)
    ap.add_argument("--nfloor", type=int, default=8)
    ap.add_argument("--scales", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    args = ap.parse_args()

    bases = {"real4": (P.smooth_real_four_mode(), REAL_TAGS), "complex4": (P.complex_four_mode(), COMPLEX_TAGS)}
    out, all_pass = [], True
    for name, (base, tags) in bases.items():
        for scale in args.scales:
            p = base.scaled(scale)
            t0 = time.perf_counter()
            table = S.spectral_table(p, -args.nmax, args.nmax, n_floor=args.nfloor)
            print(f"{name} x{scale:g}: {len(table.rows)} rows in {time.perf_counter() - t0:.1f}s, "
                  f"all converged {table.all_converged()}, n_B {table.localization_index()}")
            for N in (1, 2):
                series = A.expansion_series(p, N)
                for tag in tags:
                    rep = V.residual_report(table, series, tag)
                    all_pass &= rep.passed
                    print("   ", rep.summary())
                    out.append({"potential": name, "scale": scale, **rep.to_json_dict()})
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=1)
    print(f"{'all reports pass' if all_pass else 'SOME REPORTS FAIL'}; written to {args.out}")
    return 0 if all_pass else 1


if __name__ == "__main__":
    raise SystemExit(main())
