# -*- coding: utf-8 -*-
from __future__ import annotations

import json

import pytest

from app.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from data.repositories.trace_store import read_table_csv

TINY = {
    "name": "cli",
    "n": 16,
    "q": 16,
    "r": 2,
    "m": 16,
    "L": 2,
    "p_edge": 1.0,
    "t": 4,
    "t_pm": 5,
    "t_con": 5,
    "trials": 1,
    "sample_split": False,
}


def _write(tmp_path, **changes):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({**TINY, **changes}), encoding="utf-8")
    return path


def test_presets_lists_ids(capsys):
    assert main(["presets"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "exp1-m50" in out
    assert "barrido t_con" in out


def test_run_writes_trace(tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert main(["run", str(_write(tmp_path)), "--out-dir", str(out_dir)]) == EXIT_OK
    _, rows = read_table_csv(out_dir / "cli.csv")
    assert len(rows) == 2 * 4
    assert (out_dir / "cli_summary.csv").exists()
    assert (out_dir / "dec_altgdmin_events.log").exists()
    assert "cli\tdec-altgdmin\tok=1/1" in capsys.readouterr().out


def test_invalid_config_exits_with_config_code(tmp_path):
    bad = _write(tmp_path, r=40)
    assert main(["run", str(bad), "--out-dir", str(tmp_path / "out")]) == EXIT_CONFIG


def test_run_without_config_or_preset(tmp_path):
    assert main(["run", "--out-dir", str(tmp_path / "out")]) == EXIT_CONFIG


def test_unknown_preset(tmp_path):
    assert main(["run", "--preset", "nope", "--out-dir", str(tmp_path / "out")]) == EXIT_CONFIG


def test_all_trials_failing_exits_with_runtime_code(tmp_path):
    cfg = _write(tmp_path, m=1, algorithms=["dec-altgdmin"])
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "out")]) == EXIT_RUNTIME


def test_sweep_command(tmp_path):
    out_dir = tmp_path / "out"
    code = main(["sweep", str(_write(tmp_path)), "--param", "t_con", "--values", "1,5", "--out-dir", str(out_dir)])
    assert code == EXIT_OK
    _, rows = read_table_csv(out_dir / "cli_sweep.csv")
    assert sorted({r["value"] for r in rows}) == ["1", "5"]


def test_sweep_with_bad_values(tmp_path):
    code = main(["sweep", str(_write(tmp_path)), "--param", "m", "--values", "a,b", "--out-dir", str(tmp_path)])
    assert code == EXIT_CONFIG


def test_chart_missing_field_is_config_error(tmp_path):
    out_dir = tmp_path / "out"
    assert main(["run", str(_write(tmp_path)), "--out-dir", str(out_dir)]) == EXIT_OK
    csv_path = tmp_path / "summary_only.csv"
    csv_path.write_text("algorithm,iteration\nx,1\n", encoding="utf-8")
    code = main(["chart", str(csv_path), "--y", "error_x", "--out", str(tmp_path / "c.svg")])
    assert code == EXIT_CONFIG


def test_chart_missing_csv_is_config_error(tmp_path):
    code = main(["chart", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "c.svg")])
    assert code == EXIT_CONFIG


def test_non_contracting_network_is_config_error(tmp_path):
    cfg = _write(tmp_path, weight_scheme="equal-neighbor")
    assert main(["run", str(cfg), "--out-dir", str(tmp_path / "out")]) == EXIT_CONFIG


@pytest.mark.qt
def test_chart_command(tmp_path):
    pytest.importorskip("PyQt5.QtSvg")
    out_dir = tmp_path / "out"
    assert main(["run", str(_write(tmp_path)), "--out-dir", str(out_dir)]) == EXIT_OK
    svg = tmp_path / "c.svg"
    assert main(["chart", str(out_dir / "cli.csv"), "--out", str(svg)]) == EXIT_OK
    assert svg.read_text(encoding="utf-8").count("<polyline") == 2
