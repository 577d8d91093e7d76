import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from mmwave import cli, dispersion
from mmwave.dispersion import sweep

from .conftest import UNIT

UNIT_DOC = {"model": "relaxed", "parameters": {f: 1.0 for f in UNIT.field_names()}}
COUNTER_DOC = {"model": "cosserat", "mu_macro": 1.0, "lambda_macro": 0.0, "mu_c": -0.5, "L_c": 1.0, "rho": 1.0, "eta": 1.0}
CAUCHY_DOC = {"model": "cauchy", "parameters": {"mu_macro": 1.0, "lambda_macro": 2.0, "rho": 1.0}}


def put(tmp_path, doc, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def run(*argv):
    buf = io.StringIO()
    code = cli.main(list(argv), out=buf)
    return code, buf.getvalue()


def test_check_exit_codes(tmp_path):
    unit = put(tmp_path, UNIT_DOC)
    counter = put(tmp_path, COUNTER_DOC, "c.json")
    code, text = run("check", unit, "--set", "proposition")
    assert code == 0 and text.startswith("PropositionRealWaves: PASS")
    assert run("check", counter, "--set", "micropolar-ellipticity")[0] == 0
    code, text = run("check", counter, "--set", "cosserat-real-waves")
    assert code == 1 and "mu_c" in text and "FAIL" in text
    assert run("check", unit, "--all")[0] == 0
    assert run("check", counter, "--all")[0] == 1


def test_check_prints_every_inequality(tmp_path):
    code, text = run("check", put(tmp_path, UNIT_DOC), "--set", "PropositionRealWaves")
    assert code == 0
    assert len(text.strip().splitlines()) == 1 + 9


def test_check_tolerance(tmp_path):
    doc = json.loads(json.dumps(UNIT_DOC))
    doc["parameters"]["mu_c"] = -1e-10
    f = put(tmp_path, doc)
    assert run("check", f, "--set", "proposition")[0] == 1
    assert run("check", f, "--set", "proposition", "--tol", "1e-9")[0] == 0


@pytest.mark.parametrize(
    "doc",
    [
        {"model": "relaxed", "parameters": {f: 1.0 for f in UNIT.field_names() if f != "eta"}},
        {**UNIT_DOC, "colour": "red"},
        {"model": "relaxed", "parameters": {**UNIT_DOC["parameters"], "zeta": 1.0}},
        {"model": "plasma", "parameters": UNIT_DOC["parameters"]},
        {"model": "relaxed", "parameters": {**UNIT_DOC["parameters"], "rho": "one"}},
        {**UNIT_DOC, "sweep": {"k_max": 1.0, "steps": 3}},
        {**UNIT_DOC, "seed": 1.5},
        "[1, 2]",
        "{not json",
    ],
)
def test_malformed_input_exit_2(tmp_path, doc):
    assert run("check", put(tmp_path, doc), "--set", "proposition")[0] == 2


def test_non_positive_density_exit_2(tmp_path):
    doc = json.loads(json.dumps(UNIT_DOC))
    doc["parameters"]["rho"] = 0.0
    assert run("derive", put(tmp_path, doc))[0] == 2


def test_usage_errors(tmp_path):
    f = put(tmp_path, UNIT_DOC)
    assert run("check", f)[0] == 2
    assert run("check", f, "--set", "nonsense")[0] == 2
    assert run("check", f, "--set", "cosserat-real-waves")[0] == 0
    assert run("check", put(tmp_path, CAUCHY_DOC, "c.json"), "--set", "proposition")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("derive", str(tmp_path / "missing.json"))[0] == 2


def test_sweep_csv_unit(tmp_path):
    out = tmp_path / "u.csv"
    code, text = run("sweep", put(tmp_path, UNIT_DOC), "--kmax", "10", "--samples", "200", "--out", str(out))
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "k,branch_label,omega,status"
    data = cli.read_csv(out.read_text())
    assert len(data) == 12 and all(len(v) == 200 for v in data.values())
    assert len(rows) == 1 + 12 * 200


def test_sweep_rows_sorted(tmp_path):
    out = tmp_path / "u.csv"
    run("sweep", put(tmp_path, UNIT_DOC), "--samples", "20", "--out", str(out))
    keys = [(r.split(",")[1], float(r.split(",")[0])) for r in out.read_text().splitlines()[1:]]
    assert keys == sorted(keys)


def test_sweep_defaults_from_file(tmp_path):
    out = tmp_path / "u.csv"
    f = put(tmp_path, {**UNIT_DOC, "sweep": {"k_max": 2.0, "samples": 11}, "seed": 3})
    assert run("sweep", f, "--out", str(out))[0] == 0
    data = cli.read_csv(out.read_text())
    assert len(data["LA"]) == 11 and data["LA"][-1][0] == 2.0


def test_sweep_cauchy_two_straight_lines(tmp_path):
    out = tmp_path / "c.csv"
    assert run("sweep", put(tmp_path, CAUCHY_DOC), "--out", str(out))[0] == 0
    data = cli.read_csv(out.read_text())
    assert sorted(data) == ["CauchyP", "CauchyS"]
    k, w = np.array(data["CauchyP"]).T
    assert np.allclose(w, 2.0 * k, rtol=1e-15, atol=0)


@pytest.mark.parametrize("extra", [["--samples", "1"], ["--kmax", "0"], ["--kmax", "-3"]])
def test_sweep_invalid_grid(tmp_path, extra):
    out = tmp_path / "x.csv"
    assert run("sweep", put(tmp_path, UNIT_DOC), "--out", str(out), *extra)[0] == 2
    assert not out.exists()


def test_sweep_unwritable(tmp_path):
    assert run("sweep", put(tmp_path, UNIT_DOC), "--out", str(tmp_path / "no" / "x.csv"))[0] == 2


def test_sweep_reduced_model(tmp_path):
    out = tmp_path / "r.csv"
    assert run("sweep", put(tmp_path, UNIT_DOC), "--model", "cosserat", "--samples", "5", "--out", str(out))[0] == 0
    assert len(cli.read_csv(out.read_text())) == 4
    assert run("sweep", put(tmp_path, CAUCHY_DOC, "c.json"), "--model", "relaxed", "--out", str(out))[0] == 2


def test_csv_round_trip():
    doc = {"model": "relaxed", "parameters": {**UNIT_DOC["parameters"], "mu_c": -0.3}}
    branches = sweep(cli.ParamFile.parse(doc).params, k_max=7.0, n=60)
    data = cli.read_csv(cli.branches_csv(branches))
    assert any(w == dispersion.IMAGINARY for v in data.values() for _, w in v)
    for b in branches:
        assert data[b.name] == b.samples


def test_csv_imaginary_rows_marked():
    p = cli.ParamFile.parse({"model": "cauchy", "mu_macro": -1.0, "lambda_macro": 3.0, "rho": 1.0}).params
    text = cli.branches_csv(sweep(p, k_max=1.0, n=3))
    row = [r for r in text.splitlines() if r.startswith("1,CauchyS")][0]
    assert row == "1,CauchyS,nan,imaginary"


def test_svg_written(tmp_path):
    out, svg = tmp_path / "u.csv", tmp_path / "u.svg"
    assert run("sweep", put(tmp_path, UNIT_DOC), "--samples", "30", "--out", str(out), "--svg", str(svg))[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and 'width="800" height="600"' in text
    assert text.count("<polyline") >= 12


def test_output_is_deterministic(tmp_path):
    f = put(tmp_path, UNIT_DOC)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("sweep", f, "--out", str(a))
    run("sweep", f, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_acoustic12_e1(tmp_path):
    code, text = run("acoustic12", put(tmp_path, UNIT_DOC), "--direction", "2,0,0", "--k", "1")
    assert code == 0
    assert "normalized" in text
    assert "block-equivalence: PASS (max dev <= 1e-8" in text
    values = [float(line) for line in text.splitlines() if line.startswith("  ")]
    assert len(values) == 12 and values == sorted(values)


def test_acoustic12_isotropic_output(tmp_path):
    f = put(tmp_path, UNIT_DOC)
    vals = []
    for d in ("1,0,0", "0.3,-0.4,0.87"):
        _, text = run("acoustic12", f, "--direction", d, "--k", "1.5")
        vals.append([float(x) for x in text.splitlines() if x.startswith("  ")])
    assert np.max(np.abs(np.subtract(*vals))) <= 1e-8


@pytest.mark.parametrize("direction", ["0,0,0", "1,0", "a,b,c", "nan,0,0"])
def test_acoustic12_bad_direction(tmp_path, direction):
    assert run("acoustic12", put(tmp_path, UNIT_DOC), "--direction", direction)[0] == 2


def test_acoustic12_needs_relaxed(tmp_path):
    assert run("acoustic12", put(tmp_path, CAUCHY_DOC))[0] == 2


def test_derive(tmp_path):
    code, text = run("derive", put(tmp_path, UNIT_DOC))
    assert code == 0
    values = dict(line.split(" = ") for line in text.strip().splitlines())
    assert float(values["mu_macro"]) == 0.5 and float(values["c_p"]) == pytest.approx(math.sqrt(3.0))
    code, text = run("derive", put(tmp_path, COUNTER_DOC, "c.json"))
    assert code == 0 and "omega_r = undefined" in text


def test_derive_zero_denominator(tmp_path):
    doc = {"model": "relaxed", "parameters": {**UNIT_DOC["parameters"], "mu_micro": -1.0, "lambda_micro": 0.0, "lambda_e": 0.0}}
    assert run("derive", put(tmp_path, doc))[0] == 2


def test_verify_small(monkeypatch):
    monkeypatch.setenv("MMWAVE_THREADS", "2")
    code, text = run("verify", "--trials", "500", "--seed", "4")
    assert code == 0 and text.rstrip().endswith("result: PASS")
    assert "MicropolarStrongEllipticity => CosseratRealWaves" in text


@pytest.mark.parametrize("n", ["0", "-5"])
def test_verify_rejects_non_positive_trials(n):
    assert run("verify", "--trials", n)[0] == 2


def test_verify_bad_thread_env(monkeypatch):
    monkeypatch.setenv("MMWAVE_THREADS", "many")
    assert run("verify", "--trials", "10")[0] == 2


def test_console_entry_point(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "mmwave.cli", "check", put(tmp_path, COUNTER_DOC), "--set", "cosserat-real-waves"],
        capture_output=True, text=True,
    )
    assert r.returncode == 1 and "CosseratRealWaves: FAIL" in r.stdout
