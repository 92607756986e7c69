"""Experiment-runner behavior: exits, artifacts, precedence, determinism."""

import json
import pathlib
import subprocess
import sys

import pytest

from clocklab import cli


def run(args):
    return cli.main(args)


def only_run_dir(out, sub):
    runs = sorted((pathlib.Path(out) / sub).iterdir())
    assert len(runs) == 1
    return runs[0]


def test_success_writes_three_artifacts(tmp_path):
    rc = run(["symbol", "--algebra", "su2", "--points", "5", "--out", str(tmp_path)])
    assert rc == 0
    run_dir = only_run_dir(tmp_path, "symbol")
    for name in ("data.csv", "summary.json", "config.echo"):
        assert (run_dir / name).is_file()
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["pass"] is True
    assert summary["subcommand"] == "symbol"
    assert len(summary["config_sha256"]) == 64
    assert summary["seed"] == 2026
    assert summary["tolerances"]["tol_symbol_su2"] == 1e-10
    assert all("check_id" in c and "passed" in c for c in summary["checks"])


def test_failed_check_exits_one_with_artifacts(tmp_path):
    rc = run(["symbol", "--algebra", "su2", "--points", "3", "--out", str(tmp_path),
              "--tol-override", "symbol_su2=1e-30"])
    assert rc == 1
    summary = json.loads((only_run_dir(tmp_path, "symbol") / "summary.json").read_text())
    assert summary["pass"] is False


def test_unknown_config_key_exits_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("definitely_not_a_key=1\n")
    rc = run(["symbol", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert not (tmp_path / "o").exists()
    assert "config error" in capsys.readouterr().err


def test_bad_value_exits_two(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sym_points=eleven\n")
    assert run(["symbol", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_missing_config_file_exits_two(tmp_path):
    assert run(["symbol", "--config", str(tmp_path / "nope.cfg"),
                "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_garbled_line_exits_two(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sym_points\n")
    assert run(["symbol", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_unknown_tolerance_exits_two(tmp_path):
    assert run(["symbol", "--out", str(tmp_path / "o"),
                "--tol-override", "nonsense=1e-3"]) == 2
    assert not (tmp_path / "o").exists()


def test_config_file_beats_defaults_and_cli_beats_file(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("# comment line\nsym_points=3\nsym_algebra=su2\n")
    run(["symbol", "--config", str(cfg), "--out", str(tmp_path / "file")])
    rows = (only_run_dir(tmp_path / "file", "symbol") / "data.csv").read_text().splitlines()
    assert len(rows) == 1 + 3  # header + file-configured points
    run(["symbol", "--config", str(cfg), "--points", "6", "--out", str(tmp_path / "cli")])
    rows = (only_run_dir(tmp_path / "cli", "symbol") / "data.csv").read_text().splitlines()
    assert len(rows) == 1 + 6


def test_environment_out_override(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUT, str(tmp_path / "envdir"))
    rc = run(["symbol", "--algebra", "h4", "--points", "3"])
    assert rc == 0
    assert (tmp_path / "envdir" / "symbol").is_dir()


def test_cli_out_beats_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUT, str(tmp_path / "envdir"))
    run(["symbol", "--algebra", "h4", "--points", "3", "--out", str(tmp_path / "flag")])
    assert (tmp_path / "flag" / "symbol").is_dir()
    assert not (tmp_path / "envdir").exists()


def test_repeat_runs_are_byte_identical(tmp_path):
    for _ in range(2):
        run(["constraint", "--out", str(tmp_path)])
    runs = sorted((tmp_path / "constraint").iterdir())
    assert len(runs) == 2
    for name in ("data.csv", "summary.json", "config.echo"):
        assert (runs[0] / name).read_bytes() == (runs[1] / name).read_bytes()


def test_jobs_do_not_change_data(tmp_path):
    run(["verify-algebra", "--out", str(tmp_path / "a")])
    run(["verify-algebra", "--jobs", "4", "--out", str(tmp_path / "b")])
    a = only_run_dir(tmp_path / "a", "verify-algebra")
    b = only_run_dir(tmp_path / "b", "verify-algebra")
    assert (a / "data.csv").read_bytes() == (b / "data.csv").read_bytes()


def test_symbol_single_point_h4(tmp_path):
    """The single-point mode prints the closed-form value eps * rho^2."""
    run(["symbol", "--algebra", "h4", "--rho", "1.5", "--out", str(tmp_path)])
    rows = (only_run_dir(tmp_path, "symbol") / "data.csv").read_text().splitlines()
    assert len(rows) == 2
    family, rho, numeric, analytic, error = rows[1].split(",")
    assert family == "h4"
    assert float(analytic) == pytest.approx((1.0 / 24.0) * 2.25, abs=1e-15)
    assert float(error) < 1e-8


def test_symbol_single_point_needs_algebra(tmp_path):
    assert run(["symbol", "--rho", "1.5", "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_random_profile_uses_seed(tmp_path):
    run(["constraint", "--profile", "random", "--seed", "11", "--out", str(tmp_path / "a")])
    run(["constraint", "--profile", "random", "--seed", "11", "--out", str(tmp_path / "b")])
    run(["constraint", "--profile", "random", "--seed", "12", "--out", str(tmp_path / "c")])
    data = {k: (only_run_dir(tmp_path / k, "constraint") / "data.csv").read_bytes()
            for k in "abc"}
    assert data["a"] == data["b"]
    assert data["a"] != data["c"]


def test_progress_on_stderr_path_on_stdout(tmp_path, capsys):
    run(["symbol", "--algebra", "su2", "--points", "3", "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert "[symbol]" in captured.err
    assert str(tmp_path) in captured.out
    assert "[symbol]" not in captured.out


def test_stationary_sweep_subcommand(tmp_path):
    rc = run(["stationary-sweep", "--sizes", "5,10,20", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads(
        (only_run_dir(tmp_path, "stationary-sweep") / "summary.json").read_text())
    ids = {c["check_id"]: c for c in summary["checks"]}
    assert ids["residual-decreasing"]["passed"]
    assert ids["loglog-slope-negative"]["loglog_slope"] < 0


def test_schrodinger_summary_has_slope(tmp_path):
    rc = run(["schrodinger", "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads(
        (only_run_dir(tmp_path, "schrodinger") / "summary.json").read_text())
    slope = next(c for c in summary["checks"] if c["check_id"] == "richardson-slope")
    assert slope["richardson_slope"] == pytest.approx(2.0, abs=0.1)


def test_console_script_entry(tmp_path):
    """The module also runs as python -m clocklab."""
    result = subprocess.run(
        [sys.executable, "-m", "clocklab", "symbol", "--algebra", "h4",
         "--points", "3", "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert (tmp_path / "symbol").is_dir()
