import json

import numpy as np
import pytest

from rcmteleop.harness.checks import run_checks
from rcmteleop.harness.cli import main


def test_simulate_prints_summary_and_exits_zero(capsys):
    rc = main(["simulate", "--trajectory.duration", "0.2",
               "--trajectory.samples", "20", "--trajectory.radius", "0.004"])
    out = capsys.readouterr().out
    assert rc == 0
    summary = json.loads(out)
    assert summary["ticks"] == 200
    assert summary["kind"] == "circle"
    assert summary["max_rcm_err"] < 1e-4


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    rc = main(["simulate", "--trajectory.duration", "0.1",
               "--trajectory.samples", "10", "--output", str(out)])
    capsys.readouterr()
    assert rc == 0
    assert out.exists()
    assert (tmp_path / "run.csv.summary.json").exists()
    assert len(out.read_text().splitlines()) == 101


def test_simulate_config_file_plus_flag_override(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(
        {"trajectory": {"duration": 0.1, "samples": 10, "kind": "sinusoid"}}))
    rc = main(["simulate", "--config", str(cfg_file),
               "--control.case", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    summary = json.loads(out)
    assert summary["kind"] == "sinusoid"
    assert summary["case"] == 1


def test_check_jacobians_small_battery(capsys):
    rc = main(["check-jacobians", "--samples", "25", "--seed", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    for name in ("J_lpsi", "J_ppsi", "J_wpsi", "J_ee", "J_ins", "J_rcm",
                 "J_tip", "J_aug"):
        assert name in out
    assert "FAIL" not in out


def test_run_checks_results_structure():
    results, elapsed = run_checks(n_samples=10, seed=1)
    assert len(results) == 8
    assert all(r.passed for r in results)
    assert all(r.max_rel_dev < r.tol for r in results)
    assert elapsed > 0.0
    line = results[0].line()
    assert "ok" in line


def test_gen_trajectory_emits_json_lines(capsys):
    rc = main(["gen-trajectory", "--trajectory.kind", "square",
               "--trajectory.points_per_side", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 20
    rec = json.loads(lines[0])
    assert set(rec) == {"t", "pose"}
    assert len(rec["pose"]["position"]) == 3


def test_gen_trajectory_bend_sweep_has_psi(capsys):
    rc = main(["gen-trajectory", "--trajectory.kind", "bend_sweep",
               "--trajectory.samples", "6"])
    out = capsys.readouterr().out
    assert rc == 0
    rec = json.loads(out.strip().splitlines()[0])
    assert "psi_cmd" in rec
    assert len(rec["psi_cmd"]) == 2


def test_metrics_compares_three_runs(tmp_path, capsys):
    logs = []
    for case in (0, 1, 2):
        path = tmp_path / f"case{case}.csv"
        rc = main(["simulate", "--trajectory.duration", "0.2",
                   "--trajectory.samples", "20",
                   "--control.case", str(case), "--output", str(path)])
        assert rc == 0
        logs.append(str(path))
    capsys.readouterr()
    report_path = tmp_path / "report.json"
    rc = main(["metrics", *logs, "--out", str(report_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "orderings:" in out
    report = json.loads(report_path.read_text())
    assert set(report["cases"]) == {"0", "1", "2"} or set(report["cases"]) == {0, 1, 2}
    assert "orderings" in report


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit):
        main(["simulate", "--no.such.key", "1"])
