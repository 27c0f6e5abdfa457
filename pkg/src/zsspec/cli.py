"""Command-line front end.

    zsspec spectrum --preset zero --nmin 4 --nmax 8
    zsspec coeffs   --preset constant --a 1 --b 1 --N 3
    zsspec predict  --preset single_mode --theorem 1.1 --n 12 --N 2
    zsspec verify   --preset single_mode --theorem 1.5i --N 1 --nmin 8 --nmax 64
    zsspec a1check  --preset single_mode

Worker threads for table construction are capped by the ZS_THREADS
environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import asymptotics, monodromy, potential, spectrum, verify, wkb

COMMANDS = ("spectrum", "coeffs", "predict", "verify", "a1check")
FORMATS = ("csv", "json")
A1_MAGNITUDES = (50.0, 100.0, 200.0, 400.0, 800.0)
A1_IMAG = (0.0, 0.5)


class CliError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class RunConfig:
    command: str
    preset: str | None = None
    potential_path: str | None = None
    a: complex = 1.0
    b: complex = 1.0
    grid_size: int = 64
    n_min: int = -16
    n_max: int = 16
    n: int | None = None
    N: int = 1
    tol: float = monodromy.DEFAULT_TOL
    n_floor: int = spectrum.N_FLOOR
    theorems: list = field(default_factory=lambda: ["all"])
    slope_slack: float = verify.SLOPE_SLACK
    out: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise CliError("command", f"unknown command {self.command!r}; expected one of {COMMANDS}")
        if (self.preset is None) == (self.potential_path is None):
            raise CliError("--preset/--potential", "give exactly one of --preset or --potential")
        if self.preset is not None and self.preset not in potential.PRESETS:
            raise CliError("--preset", f"unknown preset {self.preset!r}; expected one of {potential.PRESETS}")
        if self.n_min > self.n_max:
            raise CliError("--nmin", f"n_min={self.n_min} exceeds n_max={self.n_max}")
        if not 1 <= self.N <= wkb.WKB_ORDER_CAP:
            raise CliError("--N", f"expansion order must lie in [1, {wkb.WKB_ORDER_CAP}], got {self.N}")
        if not (self.tol > 0 and np.isfinite(self.tol)):
            raise CliError("--tol", f"tolerance must be positive, got {self.tol}")
        if self.n_floor < 1:
            raise CliError("--nfloor", f"n_floor must be at least 1, got {self.n_floor}")
        if self.format not in FORMATS:
            raise CliError("--format", f"expected one of {FORMATS}, got {self.format!r}")
        if self.n is not None and self.n == 0:
            raise CliError("--n", "predictions require n != 0")
        if self.slope_slack < 0:
            raise CliError("--slack", f"slope slack must be nonnegative, got {self.slope_slack}")
        for t in self.theorems:
            if t != "all" and t not in asymptotics.THEOREMS:
                raise CliError("--theorem", f"unknown tag {t!r}; expected 'all' or one of {sorted(asymptotics.THEOREMS)}")
        if self.command in ("spectrum", "verify") and not any(abs(k) >= self.n_floor for k in range(self.n_min, self.n_max + 1)):
            raise CliError("--nmin/--nmax", f"no index with |n| >= {self.n_floor} in [{self.n_min}, {self.n_max}]")


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _cnum(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zsspec", description="Periodic Zakharov-Shabat spectra and their asymptotics.")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_argument_group("potential")
    src.add_argument("--preset", choices=potential.PRESETS)
    src.add_argument("--potential", dest="potential_path", metavar="PATH", help="potential JSON file")
    src.add_argument("--a", type=_complex_arg, default=1.0, help="first preset amplitude (default 1)")
    src.add_argument("--b", type=_complex_arg, default=1.0, help="second preset amplitude (default 1)")
    src.add_argument("--grid", dest="grid_size", type=int, default=64, help="preset grid size (default 64)")
    ap.add_argument("--nmin", dest="n_min", type=int, default=-16)
    ap.add_argument("--nmax", dest="n_max", type=int, default=16)
    ap.add_argument("--n", type=int, help="single index for predict (default: every n in [nmin, nmax])")
    ap.add_argument("--N", type=int, default=1, help="expansion order (default 1)")
    ap.add_argument("--tol", type=float, default=monodromy.DEFAULT_TOL)
    ap.add_argument("--nfloor", dest="n_floor", type=int, default=spectrum.N_FLOOR, help="smallest |n| tabulated (default 4)")
    ap.add_argument("--theorem", dest="theorems", action="append", metavar="TAG", help="theorem tag, repeatable; 'all' (default) selects every applicable tag")
    ap.add_argument("--slack", dest="slope_slack", type=float, default=verify.SLOPE_SLACK)
    ap.add_argument("--out", help="output path (default: stdout; verify writes residual_report.<format>)")
    ap.add_argument("--format", choices=FORMATS, default="csv")
    return ap


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    if not d["theorems"]:
        d["theorems"] = ["all"]
    return RunConfig(**d)


def _load_potential(cfg: RunConfig) -> potential.Potential:
    if cfg.preset is not None:
        try:
            return potential.preset(cfg.preset, cfg.a, cfg.b, cfg.grid_size)
        except ValueError as exc:
            raise CliError("--grid", str(exc)) from exc
    path = Path(cfg.potential_path)
    if not path.is_file():
        raise CliError("--potential", f"file not found: {path}")
    try:
        return potential.load(path)
    except json.JSONDecodeError as exc:
        raise CliError("--potential", f"malformed JSON in {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError("--potential", f"invalid potential in {path}: {exc}") from exc


def _tags(cfg: RunConfig, p: potential.Potential) -> list[str]:
    if "all" in cfg.theorems:
        real = potential.is_real_type(p)
        return [t for t in asymptotics.THEOREMS if real or t not in asymptotics.REAL_TYPE_ONLY]
    if not potential.is_real_type(p):
        bad = [t for t in cfg.theorems if t in asymptotics.REAL_TYPE_ONLY]
        if bad:
            raise CliError("--theorem", f"{bad} apply to real-type potentials only")
    return list(dict.fromkeys(cfg.theorems))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cmd_spectrum(cfg, p) -> int:
    table = spectrum.spectral_table(p, cfg.n_min, cfg.n_max, cfg.tol, cfg.n_floor)
    if cfg.format == "csv":
        _emit(table.to_csv(), cfg.out)
    else:
        d = table.to_json_dict()
        d["localization_index"] = table.localization_index()
        _emit(_json(d), cfg.out)
    return 0


def _cmd_coeffs(cfg, p) -> int:
    t = wkb.wkb_coefficients(p, cfg.N)
    s = asymptotics.marchenko_coefficients(t.I)
    d = {
        "N": cfg.N,
        "potential": p.fingerprint(),
        "grid_size": t.grid_size,
        "I": [_cnum(v) for v in t.I],
        "J": [_cnum(v) for v in t.J],
        "vanishing_defect": wkb.vanishing_defect(t),
        "c": [_cnum(v) for v in s.c],
        "r": [[_cnum(v) for v in rk] for rk in t.r],
        "s": [[_cnum(v) for v in sk] for sk in t.s],
    }
    _emit(_json(d), cfg.out)
    return 0


def _cmd_predict(cfg, p) -> int:
    series = asymptotics.expansion_series(p, cfg.N)
    ns = [cfg.n] if cfg.n is not None else [k for k in range(cfg.n_min, cfg.n_max + 1) if k != 0]
    out = []
    for tag in _tags(cfg, p):
        for n in ns:
            pr = asymptotics.predict(p, series, tag, n)
            out.append({"theorem": tag, "n": n, "prediction": [_cnum(v) for v in pr.values], "decay_power": pr.power})
    _emit(_json(out[0] if len(out) == 1 else out), cfg.out)
    return 0


def _cmd_verify(cfg, p) -> int:
    tags = _tags(cfg, p)
    series = asymptotics.expansion_series(p, cfg.N)
    table = spectrum.spectral_table(p, cfg.n_min, cfg.n_max, cfg.tol, cfg.n_floor)
    try:
        reports = [verify.residual_report(table, series, t, cfg.slope_slack) for t in tags]
    except ValueError as exc:
        raise CliError("--nmin/--nmax", str(exc)) from exc
    for r in reports:
        print(r.summary(), file=sys.stderr)
    out = Path(cfg.out or f"residual_report.{cfg.format}")
    if cfg.format == "json":
        out.write_text(_json({"config": _config_json(cfg), "reports": [r.to_json_dict() for r in reports]}))
    elif len(reports) == 1:
        out.write_text(reports[0].to_csv())
    else:
        for r in reports:
            out.with_name(f"{out.stem}_{r.theorem}{out.suffix}").write_text(r.to_csv())
    return 0 if all(r.passed for r in reports) else 1


def _cmd_a1check(cfg, p) -> int:
    lams = [complex(m, im) for im in A1_IMAG for m in A1_MAGNITUDES]
    rep = verify.a1_bound_check(p, lams, cfg.tol)
    if cfg.format == "json":
        d = {
            "sup_weighted": rep.sup_weighted,
            "ratio": rep.ratio,
            "pass": rep.passed,
            "samples": [{"lam": _cnum(l), "err": e, "weighted": w} for l, e, w in rep.samples],
        }
        _emit(_json(d), cfg.out)
    else:
        lines = ["lam_re,lam_im,err,weighted"]
        lines += [f"{l.real!r},{l.imag!r},{e!r},{w!r}" for l, e, w in rep.samples]
        _emit("\n".join(lines) + "\n", cfg.out)
    print(f"{'PASS' if rep.passed else 'FAIL'} a1 bound: max/min ratio {rep.ratio:.3f}", file=sys.stderr)
    return 0 if rep.passed else 1


def _config_json(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["a"], d["b"] = _cnum(cfg.a), _cnum(cfg.b)
    return d


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "coeffs": _cmd_coeffs,
    "predict": _cmd_predict,
    "verify": _cmd_verify,
    "a1check": _cmd_a1check,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        cfg.validate()
        p = _load_potential(cfg)
        return _HANDLERS[cfg.command](cfg, p)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (spectrum.RootError, monodromy.ConvergenceError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: --out: cannot write output: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
