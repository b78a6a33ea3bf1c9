import json

import numpy as np
import pytest

from leggett_lab.cli import main

SEED = ["--seed", "321"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", *SEED)
    assert code == 0
    assert "10/10 checks passed (seed 321)" in out
    assert out.count("PASS ") == 10
    assert "FAIL" not in out


def test_verify_selftest_break_fails(capsys):
    code, out, _ = run(capsys, "verify", *SEED, "--selftest-break")
    assert code == 1
    assert "FAIL" in out
    assert "9/10 checks passed" in out


def test_verify_output_is_deterministic(capsys):
    _, first, _ = run(capsys, "verify", *SEED)
    _, second, _ = run(capsys, "verify", *SEED)
    assert first == second


def test_correlate_writes_csv(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, stdout, _ = run(
        capsys, "correlate", *SEED, "--parties", "4", "--trials", "20",
        "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# leggett-lab correlate v1"
    header = lines[1].split(",")
    assert header[:3] == ["trial", "n_parties", "closed"]
    assert len(lines) == 2 + 20
    gaps = [float(row.split(",")[7]) for row in lines[2:]]
    assert max(gaps) <= 1e-10


def test_correlate_party_bounds(capsys):
    code, _, err = run(capsys, "correlate", "--parties", "9")
    assert code == 2
    assert "error:" in err


def test_scan_csv_layout(tmp_path, capsys):
    out = tmp_path / "s.csv"
    fig = tmp_path / "s.png"
    code, stdout, _ = run(
        capsys, "scan", "--n-theta", "13", "--n-phi", "9", "--n-psi", "9",
        "--out", str(out), "--fig-out", str(fig),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# leggett-lab scan v1"
    assert lines[1] == "theta,phi,psi,L_plus,L_minus,margin_plus,margin_minus"
    assert len(lines) == 2 + 13 * 9 * 9
    assert fig.exists()
    assert "best plus" in stdout
    # margins column is consistent with the left-side column
    row = lines[5].split(",")
    assert float(row[5]) == pytest.approx(float(row[3]) - 6.0, abs=1e-12)


def test_scan_degrees_units_line(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(
        capsys, "scan", "--n-theta", "5", "--n-phi", "4", "--n-psi", "4",
        "--degrees", "--no-plot", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "# units: degrees"
    last = lines[-1].split(",")
    assert float(last[0]) == pytest.approx(180.0, abs=1e-12)


def test_scan_rejects_tiny_grid(capsys):
    code, _, err = run(capsys, "scan", "--n-theta", "1", "--no-plot")
    assert code == 2
    assert "error:" in err


def test_optimize_check_and_json(tmp_path, capsys):
    out = tmp_path / "o.json"
    code, stdout, _ = run(
        capsys, "optimize", "--check", "--no-plot", "--out", str(out)
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"plus", "minus"}
    for branch in ("plus", "minus"):
        assert abs(doc[branch]["deviation"]) <= 1e-9
        assert abs(doc[branch]["theta_deviation"]) <= 1e-6
    assert "cross-check" in stdout


def test_optimize_single_branch(tmp_path, capsys):
    out = tmp_path / "o.json"
    code, _, _ = run(
        capsys, "optimize", "--branch", "minus", "--no-plot", "--out", str(out)
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"minus"}


def test_oracle_jsonl_records(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code, stdout, _ = run(
        capsys, "oracle", *SEED, "--trials", "30", "--no-plot", "--out", str(out)
    )
    assert code == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 30
    for rec in records:
        assert rec["ok"] is True
        assert rec["seed"] == 321
        assert rec["final_margin_plus"] <= 1e-10
        assert rec["final_margin_minus"] <= 1e-10
        assert rec["max_intermediate_margin"] <= 1e-10
        assert rec["chain_max_slack"] <= 1e-12
        assert rec["pair_max_slack"] <= 1e-12
        assert 2 <= rec["n_parties"] <= 5
    assert "violations: 0" in stdout
    # stable stream labeling: trial k always runs on stream k+1
    assert [r["stream"] for r in records] == [t + 1 for t in range(30)]


def test_oracle_jobs_match_serial(tmp_path, capsys):
    serial = tmp_path / "serial.jsonl"
    parallel = tmp_path / "parallel.jsonl"
    run(capsys, "oracle", *SEED, "--trials", "12", "--no-plot", "--out", str(serial))
    run(
        capsys, "oracle", *SEED, "--trials", "12", "--jobs", "3", "--no-plot",
        "--out", str(parallel),
    )
    assert serial.read_bytes() == parallel.read_bytes()


def test_oracle_rejects_bad_jobs(capsys):
    code, _, err = run(capsys, "oracle", "--jobs", "0", "--no-plot")
    assert code == 2
    assert "error:" in err


def test_env_seed_is_honored(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LEGGETT_LAB_SEED", "555")
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "(seed 555)" in out
