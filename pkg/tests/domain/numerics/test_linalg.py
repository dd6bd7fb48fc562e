# -*- coding: utf-8 -*-
from __future__ import annotations

import warnings

import numpy as np
import pytest

from domain.numerics.linalg import (
    NotSymmetricError,
    RankDeficientError,
    SingularSystemError,
    is_full_rank,
    least_squares,
    spectral_norm,
    sym_eig,
    thin_qr,
)


def test_thin_qr_orthonormal_and_reconstructs(np_rng):
    m = np_rng.standard_normal((40, 5))
    q, r = thin_qr(m)
    assert q.shape == (40, 5) and r.shape == (5, 5)
    assert np.allclose(q.T @ q, np.eye(5), atol=1e-12)
    assert np.allclose(q @ r, m, atol=1e-12)
    assert np.allclose(r, np.triu(r))
    assert np.all(np.diag(r) > 0)


def test_thin_qr_of_orthonormal_matrix_is_itself(np_rng):
    u, _ = thin_qr(np_rng.standard_normal((20, 3)))
    q, r = thin_qr(u)
    assert np.allclose(q, u, atol=1e-12)
    assert np.allclose(r, np.eye(3), atol=1e-12)


def test_thin_qr_batched_matches_single(np_rng):
    stack = np_rng.standard_normal((4, 10, 3))
    qs, rs = thin_qr(stack)
    for k in range(4):
        q, r = thin_qr(stack[k])
        assert np.allclose(qs[k], q, atol=1e-13)
        assert np.allclose(rs[k], r, atol=1e-13)


def test_thin_qr_rank_deficient_raises(np_rng):
    col = np_rng.standard_normal((10, 1))
    with pytest.raises(RankDeficientError):
        thin_qr(np.hstack([col, 2.0 * col]))
    with pytest.raises(RankDeficientError):
        thin_qr(np.zeros((5, 2)))
    assert not is_full_rank(np.zeros((5, 2)))
    assert is_full_rank(np_rng.standard_normal((5, 2)))


def test_least_squares_residual_is_orthogonal(np_rng):
    a = np_rng.standard_normal((30, 4))
    y = np_rng.standard_normal(30)
    b = least_squares(a, y)
    assert np.allclose(a.T @ (y - a @ b), 0.0, atol=1e-10)
    assert np.allclose(b, np.linalg.lstsq(a, y, rcond=None)[0], atol=1e-10)


def test_least_squares_scalar_case():
    a = np.array([[1.0], [2.0], [-1.0]])
    assert least_squares(a, 2.0 * a[:, 0])[0] == pytest.approx(2.0)


def test_least_squares_singular_column_reported(np_rng):
    good = np_rng.standard_normal((3, 8, 2))
    bad = good.copy()
    bad[1, :, 1] = bad[1, :, 0]
    y = np_rng.standard_normal((3, 8))
    with pytest.raises(SingularSystemError) as info:
        least_squares(bad, y)
    assert info.value.column == 1
    out = least_squares(bad, y, on_singular="zero")
    assert np.all(out[1] == 0.0)
    assert np.allclose(out[0], least_squares(good[0], y[0]))


def test_least_squares_underdetermined_raises(np_rng):
    with pytest.raises(SingularSystemError):
        least_squares(np_rng.standard_normal((1, 2)), np.ones(1))


def test_sym_eig_trace_and_reconstruction(np_rng):
    g = np_rng.standard_normal((7, 7))
    s = g + g.T
    vals, vecs = sym_eig(s)
    assert np.all(np.diff(vals) <= 0.0)
    assert vals.sum() == pytest.approx(np.trace(s), abs=1e-10)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.T, s, atol=1e-9)
    assert np.allclose(vals, np.sort(np.linalg.eigvalsh(s))[::-1], atol=1e-10)


def test_sym_eig_tiny_coupling_does_not_overflow():
    s = np.array([[1.0, 1e-300, 0.0], [1e-300, 2.0, 0.5], [0.0, 0.5, 3.0]])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        vals, vecs = sym_eig(s)
    assert np.all(np.isfinite(vecs))
    assert np.allclose(vals, np.sort(np.linalg.eigvalsh(s))[::-1], atol=1e-12)


def test_sym_eig_rejects_non_symmetric():
    with pytest.raises(NotSymmetricError):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spectral_norm_matches_numpy(np_rng):
    for shape in ((12, 3), (3, 12)):
        m = np_rng.standard_normal(shape)
        assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-10)
