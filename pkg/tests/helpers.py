# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np

from domain.numerics.linalg import thin_qr


def random_basis(rng: np.random.Generator, n: int, r: int) -> np.ndarray:
    return thin_qr(rng.standard_normal((n, r)))[0]
