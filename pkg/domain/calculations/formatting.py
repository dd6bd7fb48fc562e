# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from typing import Any, Optional


def fmt_float(value: Any) -> str:
    """Shortest text that reads back as the same double."""
    try:
        num = float(value)
    except Exception:
        return ""
    if num == 0.0:
        return "0"
    return repr(num)


def fmt_optional(value: Optional[Any]) -> str:
    return "" if value is None else fmt_float(value)


def parse_optional(text: Any) -> Optional[float]:
    text = str(text or "").strip()
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        return None


def fmt_decade(exponent: int) -> str:
    return "1" if int(exponent) == 0 else f"1e{int(exponent)}"


def fmt_short(value: Any) -> str:
    try:
        num = float(value)
    except Exception:
        return ""
    if not math.isfinite(num):
        return str(num)
    text = f"{num:.4g}"
    return text
