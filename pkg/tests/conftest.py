# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest

from domain.numerics.rng import RngStream
from domain.services.problem import generate_ground_truth, generate_measurements


@pytest.fixture
def np_rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture
def small_gt():
    return generate_ground_truth(30, 24, 2, RngStream(99, 1))


@pytest.fixture
def small_meas(small_gt):
    return generate_measurements(small_gt, 20, 5, RngStream(99, 2), sample_split=True, mode="materialized")

