# -*- coding: utf-8 -*-
from __future__ import annotations

import pytest

from data.repositories.trace_store import (
    TRACE_FIELDS,
    TraceStoreError,
    read_fieldnames,
    read_table_csv,
    write_table_csv,
    write_trace_csv,
)
from domain.entities.models import MetricsTrace


def test_trace_csv_layout(tmp_path):
    tr = MetricsTrace("dec-altgdmin", 0)
    tr.append(1, 0.5, 0.25, 0.1, 0.0)
    tr.append(2, 1.0, 0.125, 0.05, 0.0, cons_err_max=1e-3)
    path = write_trace_csv(tmp_path / "t.csv", tr.records, {"name": "demo", "t_con": 10})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# name=demo"
    assert lines[1] == "# t_con=10"
    assert lines[2] == ",".join(TRACE_FIELDS)
    assert lines[3] == "0,dec-altgdmin,1,0.5,0.25,0.1,0,"
    header, rows = read_table_csv(path)
    assert header == {"name": "demo", "t_con": "10"}
    assert rows[1]["cons_err_max"] == "0.001"
    assert not (tmp_path / "t.csv.tmp").exists()


def test_table_without_rows_keeps_fieldnames(tmp_path):
    path = write_table_csv(tmp_path / "empty.csv", ["a", "b"], [])
    assert read_fieldnames(path) == ["a", "b"]


def test_read_errors(tmp_path):
    with pytest.raises(TraceStoreError):
        read_table_csv(tmp_path / "nope.csv")
    only_comments = tmp_path / "c.csv"
    only_comments.write_text("# a=1\n", encoding="utf-8")
    with pytest.raises(TraceStoreError):
        read_table_csv(only_comments)
