import csv
import dataclasses
import io
import json

import numpy as np
import pytest

from zsspec import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_zero_csv(capsys):
    code, out, _ = run(["spectrum", "--preset", "zero", "--nmin", "4", "--nmax", "8"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n"]) for r in rows] == [4, 5, 6, 7, 8]
    for r in rows:
        assert abs(float(r["mu_re"]) - int(r["n"]) * np.pi) < 1e-12


def test_coeffs_constant(capsys):
    code, out, _ = run(["coeffs", "--preset", "constant", "--a", "1", "--b", "1", "--N", "3"], capsys)
    assert code == 0
    d = json.loads(out)
    assert abs(d["c"][0]["re"] - 0.15915494) < 1e-8
    assert len(d["I"]) == len(d["J"]) == len(d["r"]) == 4


def test_predict_json(capsys):
    code, out, _ = run(["predict", "--preset", "zero", "--theorem", "1.1", "--n", "7"], capsys)
    assert code == 0
    d = json.loads(out)
    assert set(d) == {"theorem", "n", "prediction", "decay_power"}
    assert d["prediction"][0]["re"] == pytest.approx(7 * np.pi)


def test_verify_writes_report_and_exit_zero(tmp_path, capsys):
    out = tmp_path / "rep.json"
    args = ["verify", "--theorem", "1.5i", "--preset", "single_mode", "--N", "1", "--nmin", "8", "--nmax", "64"]
    code, _, err = run(args + ["--format", "json", "--out", str(out)], capsys)
    assert code == 0
    d = json.loads(out.read_text())
    assert d["reports"][0]["theorem"] == "1.5i" and d["reports"][0]["pass"]
    assert "PASS" in err


def test_verify_default_output_file(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    args = ["verify", "--theorem", "1.1", "--preset", "constant", "--nmin", "8", "--nmax", "40"]
    assert run(args, capsys)[0] == 0
    assert (tmp_path / "residual_report.csv").read_text().startswith("n,residual_re")


def test_verify_exit_code_tracks_failure(monkeypatch, capsys):
    real = cli.verify.residual_report

    def failing(*a, **k):
        return dataclasses.replace(real(*a, **k), passed=False)

    monkeypatch.setattr(cli.verify, "residual_report", failing)
    args = ["verify", "--theorem", "1.1", "--preset", "constant", "--nmin", "8", "--nmax", "40", "--out", "/dev/null"]
    code, _, err = run(args, capsys)
    assert code == 1 and "FAIL" in err


def test_idempotent_output(tmp_path, capsys):
    out = tmp_path / "s.json"
    args = ["spectrum", "--preset", "single_mode", "--nmin", "4", "--nmax", "9", "--format", "json", "--out", str(out)]
    run(args, capsys)
    first = out.read_bytes()
    run(args, capsys)
    assert out.read_bytes() == first


def test_a1check(capsys):
    code, out, _ = run(["a1check", "--preset", "single_mode", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["ratio"] <= 4


def test_potential_file(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"grid_size": 32, "phi1": [{"n": 1, "re": 1.0, "im": 0.0}], "phi2": [{"n": -1, "re": 1.0}]}))
    code, out, _ = run(["predict", "--potential", str(f), "--theorem", "1.3ii", "--n", "-1"], capsys)
    assert code == 0
    assert json.loads(out)["prediction"][0]["re"] == pytest.approx(2.0)


@pytest.mark.parametrize(
    "args, field",
    [
        (["spectrum", "--potential", "/nonexistent.json"], "--potential: file not found"),
        (["spectrum", "--preset", "zero", "--nmin", "5", "--nmax", "1"], "--nmin"),
        (["coeffs", "--preset", "zero", "--N", "0"], "--N"),
        (["spectrum", "--preset", "zero", "--tol", "-1"], "--tol"),
        (["spectrum", "--preset", "zero", "--nfloor", "0"], "--nfloor"),
        (["verify", "--preset", "zero", "--theorem", "9.9"], "--theorem"),
        (["spectrum"], "--preset/--potential"),
        (["predict", "--preset", "zero", "--n", "0"], "--n"),
        (["spectrum", "--preset", "zero", "--nmin", "-3", "--nmax", "3"], "--nmin/--nmax"),
        (["predict", "--preset", "single_mode", "--b", "2", "--theorem", "1.2ii", "--n", "3"], "real-type"),
        (["spectrum", "--preset", "zero", "--grid", "48"], "--grid"),
    ],
)
def test_error_messages_name_field(args, field, capsys):
    code, _, err = run(args, capsys)
    assert code == 2
    assert field in err


def test_malformed_json(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{nope")
    code, _, err = run(["spectrum", "--potential", str(f)], capsys)
    assert code == 2 and "malformed JSON" in err
    f.write_text(json.dumps({"phi1": [{"re": 1}]}))
    code, _, err = run(["spectrum", "--potential", str(f)], capsys)
    assert code == 2 and "invalid potential" in err


def test_complex_amplitude_parsing():
    cfg = cli.config_from_args(["coeffs", "--preset", "constant", "--a", "1+2i"])
    assert cfg.a == 1 + 2j
