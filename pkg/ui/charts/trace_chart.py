# -*- coding: utf-8 -*-
"""Static SVG charts of trace CSVs: one polyline per group, logarithmic y axis.

Series are drawn with ``drawPolyline``; axes, grid and ticks go through painter paths
so the only ``<polyline>`` elements in the file are data series.
"""
from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from data.repositories.trace_store import TraceStoreError, read_fieldnames, read_table_csv
from domain.calculations.formatting import fmt_decade, fmt_short, parse_optional
from infra.logging.event_logger import log_event

WIDTH = 760
HEIGHT = 500
MARGIN_LEFT = 80
MARGIN_RIGHT = 190
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
X_TICKS = 5

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
)

Series = List[Tuple[float, float]]

_app = None


class ChartError(Exception):
    pass


class MissingFieldError(ChartError):
    pass


class ChartInputError(ChartError):
    """The trace CSV does not exist."""


def _ensure_app():
    global _app
    os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")
    from PyQt5.QtGui import QGuiApplication

    _app = QGuiApplication.instance() or QGuiApplication([])
    return _app


def collect_series(
    rows: Sequence[Dict[str, str]], x_field: str, y_field: str, group_field: str
) -> Dict[str, Series]:
    """Mean y per (group, x), groups in order of first appearance, points sorted by x.

    Rows with an empty or non-positive y are left out (log axis).
    """
    sums: Dict[str, Dict[float, List[float]]] = {}
    for row in rows:
        x = parse_optional(row.get(x_field))
        y = parse_optional(row.get(y_field))
        if x is None or y is None or not y > 0.0 or not math.isfinite(x) or not math.isfinite(y):
            continue
        group = str(row.get(group_field) or "")
        bucket = sums.setdefault(group, {}).setdefault(x, [0.0, 0.0])
        bucket[0] += y
        bucket[1] += 1.0
    return {
        g: [(x, acc[0] / acc[1]) for x, acc in sorted(points.items())]
        for g, points in sums.items()
    }


def decade_range(ys: Sequence[float]) -> Tuple[int, int]:
    lo = int(math.floor(math.log10(min(ys))))
    hi = int(math.ceil(math.log10(max(ys))))
    if hi <= lo:
        hi = lo + 1
    return lo, hi


def render_svg(
    series: Dict[str, Series],
    out_path: Path,
    x_label: str,
    y_label: str,
    title: str = "",
) -> Path:
    _ensure_app()
    from PyQt5.QtCore import QPointF, QRectF, QSize, Qt
    from PyQt5.QtGui import QColor, QFont, QPainter, QPainterPath, QPen, QPolygonF
    from PyQt5.QtSvg import QSvgGenerator

    if not series:
        raise ChartError("No hay datos positivos para graficar")
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_min, x_max = min(xs), max(xs)
    if x_max <= x_min:
        x_max = x_min + 1.0
    lo, hi = decade_range(ys)

    plot = QRectF(MARGIN_LEFT, MARGIN_TOP, WIDTH - MARGIN_LEFT - MARGIN_RIGHT, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)

    def px(x: float) -> float:
        return plot.left() + (x - x_min) / (x_max - x_min) * plot.width()

    def py(y: float) -> float:
        return plot.bottom() - (math.log10(y) - lo) / (hi - lo) * plot.height()

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    gen = QSvgGenerator()
    gen.setFileName(str(out_path))
    gen.setSize(QSize(WIDTH, HEIGHT))
    gen.setViewBox(QRectF(0, 0, WIDTH, HEIGHT))
    gen.setTitle(title or y_label)

    p = QPainter()
    if not p.begin(gen):
        raise ChartError(f"No se pudo abrir el SVG: {out_path}")
    try:
        p.setRenderHint(QPainter.Antialiasing, True)
        font = QFont("DejaVu Sans", 9)
        p.setFont(font)

        grid = QPainterPath()
        for e in range(lo, hi + 1):
            y = py(10.0 ** e)
            grid.moveTo(plot.left(), y)
            grid.lineTo(plot.right(), y)
        p.setPen(QPen(QColor("#dddddd"), 1))
        p.drawPath(grid)

        axes = QPainterPath()
        axes.moveTo(plot.left(), plot.top())
        axes.lineTo(plot.left(), plot.bottom())
        axes.lineTo(plot.right(), plot.bottom())
        for e in range(lo, hi + 1):
            y = py(10.0 ** e)
            axes.moveTo(plot.left() - 5, y)
            axes.lineTo(plot.left(), y)
        for i in range(X_TICKS + 1):
            x = plot.left() + plot.width() * i / X_TICKS
            axes.moveTo(x, plot.bottom())
            axes.lineTo(x, plot.bottom() + 5)
        p.setPen(QPen(QColor("#333333"), 1))
        p.drawPath(axes)

        for e in range(lo, hi + 1):
            y = py(10.0 ** e)
            p.drawText(QRectF(0, y - 8, plot.left() - 8, 16), Qt.AlignRight | Qt.AlignVCenter, fmt_decade(e))
        for i in range(X_TICKS + 1):
            value = x_min + (x_max - x_min) * i / X_TICKS
            x = plot.left() + plot.width() * i / X_TICKS
            p.drawText(QRectF(x - 40, plot.bottom() + 8, 80, 16), Qt.AlignHCenter | Qt.AlignTop, fmt_short(value))

        p.drawText(QRectF(plot.left(), HEIGHT - 28, plot.width(), 20), Qt.AlignHCenter, x_label)
        p.save()
        p.translate(16, plot.center().y())
        p.rotate(-90)
        p.drawText(QRectF(-plot.height() / 2, -10, plot.height(), 20), Qt.AlignHCenter, y_label)
        p.restore()
        if title:
            p.drawText(QRectF(plot.left(), 10, plot.width(), 20), Qt.AlignHCenter, title)

        for idx, (group, pts) in enumerate(series.items()):
            color = QColor(PALETTE[idx % len(PALETTE)])
            pen = QPen(color, 1.6)
            pen.setJoinStyle(Qt.RoundJoin)
            p.setPen(pen)
            p.setBrush(Qt.NoBrush)
            p.drawPolyline(QPolygonF([QPointF(px(x), py(y)) for x, y in pts]))

            ly = MARGIN_TOP + 10 + idx * 20
            lx = plot.right() + 16
            p.setPen(Qt.NoPen)
            p.setBrush(color)
            p.drawRect(QRectF(lx, ly - 5, 18, 10))
            p.setPen(QPen(QColor("#333333"), 1))
            p.drawText(QRectF(lx + 24, ly - 8, MARGIN_RIGHT - 44, 16), Qt.AlignLeft | Qt.AlignVCenter, group)
    finally:
        p.end()
    return out_path


def emit_chart(
    csv_path: Path,
    x_field: str,
    y_field: str,
    group_field: str,
    out_path: Path,
    title: Optional[str] = None,
) -> Path:
    if not Path(csv_path).is_file():
        raise ChartInputError(f"No existe el CSV de trazas: {csv_path}")
    try:
        _, rows = read_table_csv(Path(csv_path))
        fields = set(read_fieldnames(Path(csv_path)))
    except (TraceStoreError, OSError) as exc:
        raise ChartError(str(exc))
    for f in (x_field, y_field, group_field):
        if f not in fields:
            raise MissingFieldError(f"Campo inexistente en {csv_path}: {f}")
    series = collect_series(rows, x_field, y_field, group_field)
    path = render_svg(series, Path(out_path), x_field, y_field, title=title or "")
    log_event("chart_written", f"{path} ({len(series)} series)", level=logging.INFO)
    return path
