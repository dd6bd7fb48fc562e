# -*- coding: utf-8 -*-
"""Dense kernels: Householder thin QR, QR least squares, cyclic Jacobi eigensolver.

Every kernel accepts numpy arrays and is pure. ``thin_qr`` and ``least_squares`` also
accept stacks of matrices (leading batch axes), which is how the per-column solves of a
node are done in one call.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

QR_RANK_TOL = 1e-12
LS_RANK_TOL = 1e-6  # singular-value ratio, i.e. 1e-12 on the eigenvalues of A^T A
SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class NumericsError(Exception):
    pass


class RankDeficientError(NumericsError):
    def __init__(self, message: str, index: int = -1) -> None:
        super().__init__(message)
        self.index = int(index)


class SingularSystemError(NumericsError):
    def __init__(self, message: str, column: int = -1) -> None:
        super().__init__(message)
        self.column = int(column)


class NotSymmetricError(NumericsError):
    pass


def _apply_reflector(v: np.ndarray, block: np.ndarray) -> np.ndarray:
    proj = np.einsum("...i,...ij->...j", v, block)
    return block - 2.0 * v[..., :, None] * proj[..., None, :]


def _householder(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a = np.array(m, dtype=np.float64, copy=True)
    n, r = a.shape[-2], a.shape[-1]
    reflectors = []
    for j in range(r):
        x = a[..., j:, j]
        norm_x = np.linalg.norm(x, axis=-1)
        alpha = np.where(x[..., 0] >= 0.0, -norm_x, norm_x)
        v = x.copy()
        v[..., 0] -= alpha
        norm_v = np.linalg.norm(v, axis=-1)
        nonzero = norm_v > 0.0
        v = np.where(nonzero[..., None], v / np.where(nonzero, norm_v, 1.0)[..., None], 0.0)
        a[..., j:, j:] = _apply_reflector(v, a[..., j:, j:])
        reflectors.append(v)

    q = np.zeros(a.shape[:-2] + (n, r), dtype=np.float64)
    idx = np.arange(r)
    q[..., idx, idx] = 1.0
    for j in reversed(range(r)):
        q[..., j:, :] = _apply_reflector(reflectors[j], q[..., j:, :])

    rmat = np.triu(a[..., :r, :])
    # sign convention: diag(R) >= 0
    signs = np.where(np.diagonal(rmat, axis1=-2, axis2=-1) < 0.0, -1.0, 1.0)
    return q * signs[..., None, :], rmat * signs[..., :, None]


def _rank_ok(rmat: np.ndarray, tol: float) -> np.ndarray:
    d = np.abs(np.diagonal(rmat, axis1=-2, axis2=-1))
    return d.min(axis=-1) > tol * d.max(axis=-1)


def is_full_rank(m: np.ndarray, tol: float = QR_RANK_TOL) -> bool:
    m = np.asarray(m, dtype=np.float64)
    if m.shape[-2] < m.shape[-1] or m.shape[-1] == 0:
        return False
    _, rmat = _householder(m)
    return bool(np.all(_rank_ok(rmat, tol)))


def thin_qr(m: np.ndarray, tol: float = QR_RANK_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Thin QR with positive diagonal R.

    Raises RankDeficientError when min |R_jj| <= tol * max |R_jj| for the matrix (or
    for any matrix of a stack; ``index`` is then its flat position).
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim < 2:
        raise RankDeficientError("Se esperaba una matriz")
    n, r = m.shape[-2], m.shape[-1]
    if n < r or r == 0:
        raise RankDeficientError(f"Matriz {n}x{r} no admite QR delgada de rango completo")
    q, rmat = _householder(m)
    ok = _rank_ok(rmat, tol)
    if not np.all(ok):
        bad = int(np.flatnonzero(~np.ravel(ok))[0])
        raise RankDeficientError("Matriz sin rango columna completo", index=bad)
    return q, rmat


def least_squares(a: np.ndarray, y: np.ndarray, on_singular: str = "raise") -> np.ndarray:
    """argmin_b ||y - A b|| via QR of A.

    ``a`` is (m, r) or a stack (k, m, r) with ``y`` of shape (m,) or (k, m). With
    ``on_singular="zero"`` rank-deficient systems return b = 0 instead of raising.
    """
    a = np.asarray(a, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m, r = a.shape[-2], a.shape[-1]
    if m < r:
        raise SingularSystemError(f"Sistema subdeterminado: m={m} < r={r}")
    q, rmat = _householder(a)
    ok = np.atleast_1d(_rank_ok(rmat, LS_RANK_TOL))
    if not np.all(ok) and on_singular == "raise":
        bad = int(np.flatnonzero(~ok)[0])
        raise SingularSystemError("A^T A numericamente singular", column=bad)

    rhs = np.einsum("...ij,...i->...j", q, y)
    if a.ndim == 2:
        if not ok[0]:
            return np.zeros(r, dtype=np.float64)
        return np.linalg.solve(rmat, rhs)

    out = np.zeros(a.shape[:-2] + (r,), dtype=np.float64)
    flat_ok = ok.reshape(a.shape[:-2])
    if np.any(flat_ok):
        out[flat_ok] = np.linalg.solve(rmat[flat_ok], rhs[flat_ok][..., None])[..., 0]
    return out


def sym_eig(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver. Eigenvalues descending, eigenvectors as columns."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise NotSymmetricError("Se esperaba una matriz cuadrada")
    scale = float(np.linalg.norm(s))
    if float(np.linalg.norm(s - s.T)) > SYMMETRY_TOL * scale:
        raise NotSymmetricError("La matriz no es simetrica")

    n = s.shape[0]
    a = 0.5 * (s + s.T)
    v = np.eye(n)
    threshold = JACOBI_TOL * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # below the resolution of both diagonal entries
                tiny = 100.0 * abs(apq)
                if abs(a[p, p]) + tiny == abs(a[p, p]) and abs(a[q, q]) + tiny == abs(a[q, q]):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0.0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], v[:, order]


def spectral_norm(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    gram = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
    top = sym_eig(gram)[0][0]
    return float(np.sqrt(max(top, 0.0)))
