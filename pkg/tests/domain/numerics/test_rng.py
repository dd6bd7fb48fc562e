# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np

from domain.numerics.rng import RngStream, fold_seed, gaussian_matrix, splitmix64


def test_stream_is_pure():
    s = RngStream(5, 3)
    assert np.array_equal(s.uniforms(10), s.uniforms(10))
    assert np.array_equal(s.standard_normals(9), s.standard_normals(9))


def test_substreams_differ():
    s = RngStream(5)
    assert not np.array_equal(s.substream(0).uniforms(5), s.substream(1).uniforms(5))
    assert s.substream(4) == s.substream(4)


def test_prefix_consistency_of_normals():
    s = RngStream(11, 2)
    assert np.array_equal(s.standard_normals(7), s.standard_normals(8)[:7])


def test_fold_seed_distinct_per_index():
    seeds = {fold_seed(42, k) for k in range(100)}
    assert len(seeds) == 100
    assert splitmix64(0) != 0


def test_normals_have_unit_moments():
    z = RngStream(1).standard_normals(200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1.0) < 0.02


def test_gaussian_matrix_row_major():
    s = RngStream(8)
    m = gaussian_matrix(3, 4, s)
    assert m.shape == (3, 4)
    assert np.array_equal(m.ravel(), s.standard_normals(12))
