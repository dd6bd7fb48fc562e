# -*- coding: utf-8 -*-
from __future__ import annotations

import math

from domain.numerics.linalg import NumericsError


class GaussianDomainError(NumericsError):
    pass


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def truncated_gauss_second_moment(c: float) -> float:
    """E[z^2 1{|z| <= c}] for standard normal z: (2 Phi(c) - 1) - 2 c phi(c)."""
    c = float(c)
    if c < 0.0:
        raise GaussianDomainError(f"c debe ser >= 0: {c}")
    if c == 0.0:
        return 0.0
    value = math.erf(c / math.sqrt(2.0)) - 2.0 * c * std_normal_pdf(c)
    return min(max(value, 0.0), 1.0)
