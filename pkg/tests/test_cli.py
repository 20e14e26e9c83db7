"""End-to-end command-line checks through subprocess calls."""

import json
import math
import re
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest

from bdcount import canonicalize, equidispersion_phi, model_from_document

SCI_12 = re.compile(r"^-?\d\.\d{11}e[+-]\d{2,}$")

POISSON_SPEC = {"family": "base", "base": {"kind": "poisson", "lambda": 2.0}}
PERTURBED_SPEC = {
    "family": "type1",
    "base": {"kind": "poisson", "lambda": 2.3},
    "points": [0],
    "factors": [2.2],
}


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "bdcount", *argv], capture_output=True, text=True
    )


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_pmf_csv_format(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    proc = run_cli("pmf", "--spec", spec, "--n-max", "12")
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "n,p,cumulative"
    body = [l for l in lines[1:] if not l.startswith("#")]
    assert len(body) == 13
    for row in body:
        n, p, c = row.split(",")
        assert SCI_12.match(p) and SCI_12.match(c)
    assert abs(float(body[2].split(",")[1]) - 2.0 * math.exp(-2.0)) < 1e-12
    footers = [l for l in lines if l.startswith("#")]
    assert footers[0].startswith("# mean,") and footers[1].startswith("# variance,")
    assert abs(float(footers[0].split(",")[1]) - 2.0) < 1e-9


def test_pmf_json_format(tmp_path):
    spec = write_spec(tmp_path, PERTURBED_SPEC)
    proc = run_cli("pmf", "--spec", spec, "--n-max", "40", "--format", "json")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["n"][:3] == [0, 1, 2]
    assert abs(sum(doc["p"]) - 1.0) < 1e-9
    assert abs(doc["cumulative"][-1] - sum(doc["p"])) < 1e-12


def test_pmf_out_file(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    out = tmp_path / "table.csv"
    proc = run_cli("pmf", "--spec", spec, "--out", str(out))
    assert proc.returncode == 0
    assert proc.stdout == ""
    assert out.read_text().startswith("n,p,cumulative")


def test_moments_csv(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    proc = run_cli("moments", "--spec", spec)
    assert proc.returncode == 0
    header, row = proc.stdout.strip().split("\n")
    assert header.split(",")[:2] == ["mean", "variance"]
    values = [float(v) for v in row.split(",")]
    assert abs(values[0] - 2.0) < 1e-9
    assert abs(values[2] - 1.0) < 1e-9


def test_fit_counts_file(tmp_path):
    data = tmp_path / "counts.csv"
    data.write_text("0\n0\n1\n2\n")
    proc = run_cli("fit", "--data", str(data), "--kind", "poisson")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["converged"] is True
    assert abs(math.exp(doc["eta_hat"][0]) - 0.75) < 1e-8
    assert doc["model"]["base"]["kind"] == "poisson"
    assert doc["sample_size"] == 4.0


def test_fit_frequency_file_with_header(tmp_path):
    data = tmp_path / "freqs.csv"
    data.write_text("value,count\n0,10\n1,14\n2,9\n3,4\n")
    proc = run_cli("fit", "--data", str(data), "--kind", "geometric", "--format", "csv")
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "key,value"
    table = dict(l.split(",", 1) for l in lines[1:])
    assert table["converged"] == "True"
    assert SCI_12.match(table["eta_0"])
    ## geometric MLE matches the sample mean 44/37
    lam_hat = math.exp(float(table["eta_0"]))
    mean = 44.0 / 37.0
    assert abs(lam_hat - mean / (1.0 + mean)) < 1e-8


def test_fit_profile_grid(tmp_path):
    rng = np.random.default_rng(50)
    counts = rng.poisson(2.0, size=300)
    data = tmp_path / "c.csv"
    data.write_text("\n".join(str(int(c)) for c in counts) + "\n")
    proc = run_cli(
        "fit", "--data", str(data), "--kind", "negative_binomial", "--r", "2.0",
        "--profile", "r", "--profile-grid", "1.0,4.0,16.0",
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["nuisance"]["name"] == "r"
    assert doc["nuisance"]["value"] > 0.0


def test_fit_nonconvergence_exit_code(tmp_path, monkeypatch, capsys):
    from bdcount import cli

    data = tmp_path / "d.csv"
    data.write_text("0\n1\n1\n2\n5\n")
    real = cli.fit_mle

    def stubborn(template, sample, policy, **kw):
        return replace(real(template, sample, policy, **kw), converged=False)

    monkeypatch.setattr(cli, "fit_mle", stubborn)
    rc = cli.main(["fit", "--data", str(data), "--kind", "poisson"])
    capsys.readouterr()
    assert rc == 3


def test_surface_csv_and_nan_nodes(tmp_path):
    proc = run_cli(
        "surface", "--kind", "geometric", "--q", "2",
        "--lambda-grid", "0.5:1.5:5", "--phi-grid", "0.2:2.0:4",
    )
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "lambda,phi,index"
    assert len(lines) == 1 + 5 * 4
    ## nodes past lambda = 1 have no stationary law and print as nan
    assert any(row.endswith(",nan") for row in lines[1:])
    assert any(not row.endswith(",nan") for row in lines[1:])


def test_surface_svg(tmp_path):
    out = tmp_path / "surface.svg"
    proc = run_cli(
        "surface", "--kind", "poisson", "--q", "3",
        "--lambda-grid", "0.5:4.0:12", "--phi-grid", "0.1:1.5:10",
        "--format", "svg", "--out", str(out),
    )
    assert proc.returncode == 0
    svg = out.read_text()
    assert svg.startswith("<svg ") and svg.rstrip().endswith("</svg>")
    assert svg.count("<rect") > 50
    ## the unit-index contour crosses this window
    assert "<polyline" in svg


def test_contour_known_root(tmp_path):
    proc = run_cli(
        "contour", "--kind", "poisson", "--q", "3", "--phi", "0.2",
        "--lambda-range", "0.05:10",
    )
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    assert lines[0] == "phi,lambda_root"
    roots = [float(l.split(",")[1]) for l in lines[1:] if not l.startswith("#")]
    assert len(roots) == 1
    assert abs(roots[0] - 2.055) < 5e-3


def test_contour_degenerate(tmp_path):
    proc = run_cli(
        "contour", "--kind", "poisson", "--q", "2", "--phi", "1.0",
        "--lambda-range", "0.1:5", "--format", "json",
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["degenerate"] is True
    assert doc["roots"] == []


def test_equiphi_row(tmp_path):
    proc = run_cli("equiphi", "--lambda", "3.2", "--q", "2")
    assert proc.returncode == 0
    header, row = proc.stdout.strip().split("\n")
    assert header == "lambda,q,phi,mean,variance"
    cells = row.split(",")
    assert abs(float(cells[2]) - equidispersion_phi(3.2, 2)) < 1e-10
    assert abs(float(cells[3]) - 2.0) < 1e-9
    assert abs(float(cells[4]) - 2.0) < 1e-9


def test_simulate_deterministic_output(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    argv = ("simulate", "--spec", spec, "--seed", "31", "--sample-time", "400")
    a = run_cli(*argv)
    b = run_cli(*argv)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    lines = a.stdout.strip().split("\n")
    metadata = json.loads(lines[0].lstrip("# "))
    assert metadata["seed"] == 31
    assert metadata["scheme"] == "linear"
    assert metadata["rng"].startswith("numpy.random.default_rng")
    assert lines[1] == "state,weight"
    assert lines[-1].startswith("# tv_distance,")
    weights = [float(l.split(",")[1]) for l in lines[2:-1]]
    assert abs(sum(weights) - 1.0) < 1e-9


def test_simulate_out_file_prints_tv(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    out = tmp_path / "occupancy.csv"
    proc = run_cli(
        "simulate", "--spec", spec, "--seed", "5", "--sample-time", "300",
        "--out", str(out),
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("tv_distance,")
    assert float(proc.stdout.split(",")[1]) < 0.5
    assert out.read_text().splitlines()[1] == "state,weight"


def test_simulate_mixture_spec(tmp_path):
    spec = write_spec(tmp_path, {
        "family": "mixture", "variant": "zero_inflated",
        "base": {"kind": "poisson", "lambda": 2.0}, "points": [0], "omegas": [0.2],
    })
    proc = run_cli(
        "simulate", "--spec", spec, "--seed", "17", "--sample-time", "2000",
        "--format", "json",
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["tv_distance"] < 0.1


def test_exit_code_2_cases(tmp_path):
    missing = run_cli("pmf", "--spec", str(tmp_path / "nope.json"))
    assert missing.returncode == 2 and "error:" in missing.stderr

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run_cli("pmf", "--spec", str(broken)).returncode == 2

    bad_param = write_spec(tmp_path, {
        "family": "base", "base": {"kind": "geometric", "lambda": 1.2}
    }, "bad.json")
    proc = run_cli("pmf", "--spec", bad_param)
    assert proc.returncode == 2 and "error:" in proc.stderr

    bad_family = write_spec(tmp_path, {
        "family": "type3", "base": {"kind": "poisson", "lambda": 1.0},
        "points": [0], "factors": [2.0],
    }, "fam.json")
    assert run_cli("pmf", "--spec", bad_family).returncode == 2

    spec = write_spec(tmp_path, POISSON_SPEC)
    zero_time = run_cli("simulate", "--spec", spec, "--seed", "1", "--sample-time", "0")
    assert zero_time.returncode == 2

    assert run_cli().returncode == 2


def test_exit_code_4_state_guard(tmp_path):
    spec = write_spec(tmp_path, POISSON_SPEC)
    proc = run_cli(
        "simulate", "--spec", spec, "--seed", "2", "--sample-time", "5000",
        "--max-state", "3",
    )
    assert proc.returncode == 4
    assert "guard bound" in proc.stderr


def test_exit_code_4_series_cap(tmp_path):
    slow = write_spec(tmp_path, {
        "family": "base", "base": {"kind": "cmp", "lambda": 0.9999, "nu": 1e-6}
    }, "slow.json")
    proc = run_cli("pmf", "--spec", slow, "--max-terms", "1000")
    assert proc.returncode == 4
    assert "error:" in proc.stderr


def test_spec_series_block(tmp_path):
    doc = {
        "family": "base",
        "base": {"kind": "cmp", "lambda": 0.9999, "nu": 1e-6},
        "series": {"max_terms": 1000},
    }
    capped = write_spec(tmp_path, doc, "capped.json")
    proc = run_cli("pmf", "--spec", capped, "--n-max", "3")
    assert proc.returncode == 4

    ## an explicit flag wins over the file block
    proc = run_cli("pmf", "--spec", capped, "--n-max", "3", "--max-terms", "2000000")
    assert proc.returncode == 0

    bad = write_spec(tmp_path, {**doc, "series": {"cap": 10}}, "bad_series.json")
    proc = run_cli("pmf", "--spec", bad, "--n-max", "3")
    assert proc.returncode == 2
    assert "series" in proc.stderr


def test_cli_roundtrip_pmf_to_fit(tmp_path):
    spec = write_spec(tmp_path, PERTURBED_SPEC)
    table = run_cli("pmf", "--spec", spec, "--n-max", "80", "--format", "json")
    assert table.returncode == 0
    doc = json.loads(table.stdout)
    data = tmp_path / "table.csv"
    data.write_text("\n".join(f"{n},{p * 1e6}" for n, p in zip(doc["n"], doc["p"])) + "\n")
    fit = run_cli(
        "fit", "--data", str(data), "--kind", "poisson",
        "--family", "type1", "--points", "0",
    )
    assert fit.returncode == 0
    eta_hat = np.asarray(json.loads(fit.stdout)["eta_hat"])
    eta_true = canonicalize(model_from_document(PERTURBED_SPEC)).eta
    assert np.all(np.abs(eta_hat - eta_true) < 1e-6)
