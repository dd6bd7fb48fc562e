# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest

from domain.numerics.gaussian import GaussianDomainError, truncated_gauss_second_moment
from domain.numerics.linalg import NumericsError
from domain.numerics.rng import RngStream


def test_edges():
    assert truncated_gauss_second_moment(0.0) == 0.0
    assert truncated_gauss_second_moment(12.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(GaussianDomainError):
        truncated_gauss_second_moment(-1.0)
    assert issubclass(GaussianDomainError, NumericsError)


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.0])
def test_matches_monte_carlo(c):
    z = RngStream(77).standard_normals(400_000)
    empirical = float(np.mean(np.where(np.abs(z) <= c, z * z, 0.0)))
    assert truncated_gauss_second_moment(c) == pytest.approx(empirical, abs=0.01)
