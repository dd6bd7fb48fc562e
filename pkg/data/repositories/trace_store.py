# -*- coding: utf-8 -*-
"""CSV files for traces and summaries.

A file may start with ``# key=value`` comment lines; readers skip them and return them
as a dict.
"""
from __future__ import annotations

import csv
import io
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from domain.calculations.formatting import fmt_float, fmt_optional
from domain.entities.models import TraceRecord

TRACE_FIELDS = (
    "trial",
    "algorithm",
    "iteration",
    "elapsed_seconds",
    "error_x",
    "se2_node1",
    "max_disagreement_frob",
    "cons_err_max",
)


class TraceStoreError(Exception):
    pass


def trace_row(rec: TraceRecord) -> List[str]:
    return [
        str(rec.trial_id),
        rec.algorithm_tag,
        str(rec.iteration),
        fmt_float(rec.elapsed_seconds),
        fmt_float(rec.error_x),
        fmt_float(rec.se2_node1),
        fmt_float(rec.max_disagreement_frob),
        fmt_optional(rec.cons_err_max),
    ]


def _render(fieldnames: Sequence[str], rows: Iterable[Sequence[Any]], header: Optional[Dict[str, Any]]) -> str:
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(fieldnames))
    for row in rows:
        writer.writerow(list(row))
    return buf.getvalue()


def write_table_csv(
    path: Path,
    fieldnames: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header: Optional[Dict[str, Any]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(_render(fieldnames, rows, header), encoding="utf-8", newline="")
        os.replace(str(tmp), str(path))
    except OSError as exc:
        raise TraceStoreError(f"No se pudo escribir {path}: {exc}")
    finally:
        if tmp.exists():
            try:
                tmp.unlink()
            except Exception:
                pass
    return path


def write_trace_csv(path: Path, records: Iterable[TraceRecord], header: Optional[Dict[str, Any]] = None) -> Path:
    return write_table_csv(path, TRACE_FIELDS, (trace_row(r) for r in records), header)


def read_table_csv(path: Path) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceStoreError(f"No se pudo leer {path}: {exc}")
    header: Dict[str, str] = {}
    body: List[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise TraceStoreError(f"CSV sin encabezado: {path}")
    reader = csv.DictReader(body)
    return header, [dict(row) for row in reader]


def read_fieldnames(path: Path) -> List[str]:
    _, rows = read_table_csv(path)
    if rows:
        return list(rows[0].keys())
    path = Path(path)
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            return next(csv.reader([line]))
    return []
