"""Command-line surface."""

import json

import pytest
from click.testing import CliRunner

from painleve_tr.cli import main


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, ["--cache-dir", str(tmp_path / "c"), *args])
    return invoke


def test_tr_emits_f2(run):
    r = run("tr", "--label", "PI", "--q0", "1", "--gmax", "3")
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["F"]["2"] == "-7/207360" and len(doc["hash"]) == 64


def test_tr_cached_equals_fresh(run, tmp_path):
    args = ("tr", "--label", "PII", "--q0", "1", "--theta", "1", "--gmax", "2", "--nmax", "2")
    first, second = run(*args), run(*args)
    fresh = CliRunner().invoke(main, ["--no-cache", *args])
    assert first.output == second.output == fresh.output
    assert list((tmp_path / "c").rglob("omega_*.json"))


def test_tau_sigma_is_even(run):
    r = run("tau", "--label", "PII", "--q0", "1", "--theta", "1", "--order", "6")
    assert r.exit_code == 0, r.output
    sigma = json.loads(r.output)["series"]["sigma"]
    assert sigma["parity"] == "even"
    assert all(sigma["coefficients"][str(k)] == "0" for k in (1, 3, 5))


def test_csv_output(run):
    r = run("--format", "csv", "tau", "--label", "PI", "--q0", "1", "--order", "2")
    lines = r.output.strip().splitlines()
    assert lines[0] == "hash,series,hbar_order,coefficient" and len(lines) > 4


def test_float_rejected(run):
    r = run("curve", "--label", "PI", "--q0", "0.5")
    assert r.exit_code == 2
    assert json.loads(r.output)["error"]["kind"] == "input"


def test_capability_violation(run):
    r = run("tau", "--label", "PVI", "--mode", "symbolic")
    assert r.exit_code == 3
    err = json.loads(r.output)["error"]
    assert err["kind"] == "capability" and "numeric mode only" in err["reason"]


def test_singular_base_is_an_input_error(run):
    r = run("curve", "--label", "PI", "--q0", "0")
    assert r.exit_code == 2 and "SingularTime" in json.loads(r.output)["error"]["reason"]


def test_curve_pretty_and_pv(run):
    r = run("--format", "pretty", "curve", "--label", "PV", "--Q0", "3", "--theta0", "1",
            "--theta1", "1/3", "--thetainf", "241/48", "--t", "2")
    assert r.exit_code == 0, r.output
    assert "sqrt: 2145" in r.output and "singular time: False" in r.output


def test_detform_reports_tt(run):
    r = run("detform", "--label", "PI", "--order", "2")
    doc = json.loads(r.output)
    assert r.exit_code == 0 and all(row["ok"] for row in doc["tt"])


def test_verify_golden_exit_zero(run):
    r = run("verify", "--suite", "golden", "--timestamp", "fixed")
    assert r.exit_code == 0, r.output[-2000:]
    doc = json.loads(r.output)
    assert doc["ok"] and doc["reports"][0]["counts"]["fail"] == 0


def test_verify_conflicts_do_not_fail(run):
    r = run("verify", "--suite", "cross", "--label", "PI")
    doc = json.loads(r.output)
    assert r.exit_code == 0 and doc["reports"][0]["counts"]["conflict"] == 4


def test_verify_reports_byte_identical(run):
    args = ("verify", "--suite", "tau", "--label", "PI", "--timestamp", "T", "--no-runtimes")
    assert run(*args).output == run(*args).output
