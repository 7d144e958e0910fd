"""
Tests for the command-line driver
"""

import json

import pytest

from cfpoisson.cli import main
from cfpoisson.schemes.checks import check_base
from cfpoisson.shared.io import load_scheme, read_csv
from cfpoisson.suspension.poisson import poisson_entropy


def run(tmp_path, *argv):
    out = tmp_path / "out"
    status = main([*argv, "--out", str(out)])
    return status, out


def report(out):
    return json.loads((out / "report.json").read_text())


def test_check_reports_mixing_failure(scheme_file, tmp_path):
    """Test that a failed condition exits 1 and is recorded"""
    status, out = run(tmp_path, "check", "--scheme", str(scheme_file))
    assert status == 1
    data = report(out)
    assert data["passed"] is False
    assert data["depth"] == 2
    conditions = {r["condition"]: r["passed"] for r in data["reports"]}
    assert conditions["base"] is True
    assert conditions["mixing"] is False
    rows = read_csv(out / "check.csv")
    assert any(r["reason"] == "copy_counts_not_increasing" for r in rows)


def test_entropy(scheme_file, tmp_path):
    """Test the entropy curve command"""
    status, out = run(tmp_path, "entropy", "--scheme", str(scheme_file))
    assert status == 0
    rows = read_csv(out / "entropy.csv")
    assert [(r["n"], r["mu_num"], r["mu_den"]) for r in rows] == [("1", "1", "2"), ("2", "1", "4")]
    assert float(rows[0]["f_nats"]) == pytest.approx(poisson_entropy(0.5), rel=1e-12)
    assert float(rows[1]["f_nats"]) == pytest.approx(poisson_entropy(0.25), rel=1e-12)


def test_mixing_curve(scheme_file, tmp_path):
    """Test the decay curve command"""
    status, out = run(tmp_path, "mixing", "--scheme", str(scheme_file), "--radii", "0", "3", "5")
    assert status == 0
    rows = read_csv(out / "mixing.csv")
    assert [list(r.values()) for r in rows] == [["0", "1", "1"], ["3", "1", "2"], ["5", "0", "1"]]


def test_output_is_deterministic(scheme_file, tmp_path):
    """Test that repeated runs write identical reports"""
    first = main(["mixing", "--scheme", str(scheme_file), "--out", str(tmp_path / "a")])
    second = main(
        ["mixing", "--scheme", str(scheme_file), "--out", str(tmp_path / "b"), "--workers", "2"]
    )
    assert first == second == 0
    assert (tmp_path / "a" / "report.json").read_text() == (
        tmp_path / "b" / "report.json"
    ).read_text()


def test_freeness(scheme_file, tmp_path):
    """Test the freeness witness command"""
    status, out = run(tmp_path, "freeness", "--scheme", str(scheme_file), "--element", "1")
    assert status == 0
    witness = report(out)["witnesses"][0]
    assert witness["level"] == 1
    assert witness["shift"] == 10


def test_covariance(scheme_file, tmp_path):
    """Test the covariance command for an element with a known correlation"""
    status, out = run(
        tmp_path,
        "covariance",
        "--scheme",
        str(scheme_file),
        "--element",
        "3",
        "--trials",
        "3000",
        "--seed",
        "5",
    )
    rows = read_csv(out / "covariance.csv")
    assert list(rows[0].keys()) == ["g_norm", "exact_num", "exact_den", "mc_estimate", "stderr"]
    assert (rows[0]["g_norm"], rows[0]["exact_num"], rows[0]["exact_den"]) == ("3", "1", "2")
    assert status == (0 if report(out)["estimates"][0]["brackets"] else 1)


def test_build(tmp_path):
    """Test building and storing a scheme"""
    status, out = run(tmp_path, "build", "--group", "Z", "--depth", "2")
    assert status == 0
    s = load_scheme(out / "scheme.json")
    assert s.depth == 2
    assert check_base(s).passed
    assert report(out)["copy_counts"] == [2, 3]


def test_runtime_error_is_reported(scheme_file, tmp_path):
    """Test that a lab error during a run exits 1 with the reason in the report"""
    status, out = run(
        tmp_path, "mixing", "--scheme", str(scheme_file), "--radii", "500", "--budget", "2"
    )
    assert status == 1
    assert report(out)["error"] == "undefined_at_budget"


def test_exhausted_build_is_reported(tmp_path):
    """Test that a build that cannot meet its requirements exits 1 with a report"""
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {
                "group": "Z",
                "depth": 2,
                "build": {"triangleWitnesses": [1], "lSearchBound": 1},
            }
        )
    )
    status, out = run(tmp_path, "build", "--config", str(config))
    assert status == 1
    data = report(out)
    assert data["passed"] is False
    assert data["error"] == "search_exhausted"
    assert data["depth"] is None
    assert data["group"] == {"kind": "integer-lattice", "params": {"dimension": 1}}
    assert read_csv(out / "build.csv") == [{"error": "search_exhausted"}]


def test_bad_scheme_file(tmp_path):
    """Test that an unreadable scheme file exits 2"""
    path = tmp_path / "bad.json"
    path.write_text("{")
    status, out = run(tmp_path, "check", "--scheme", str(path))
    assert status == 2
    assert not (out / "report.json").exists()


def test_invalid_configuration(scheme_file, tmp_path):
    """Test that invalid options exit 2"""
    status, _ = run(tmp_path, "sample", "--scheme", str(scheme_file), "--trials", "0")
    assert status == 2
    status, _ = run(tmp_path, "build", "--group", "F2")
    assert status == 2
    status, _ = run(tmp_path, "check", "--scheme", str(scheme_file), "--element", "[1")
    assert status == 2


def test_unknown_command():
    """Test that argparse rejects unknown commands"""
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2
