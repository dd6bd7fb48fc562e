# -*- coding: utf-8 -*-
"""Error measures: SE2 subspace distance, normalized recovery error, node disagreement
and consensus error."""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from domain.entities.models import GroundTruth, NodeState
from domain.numerics.linalg import sym_eig

ORTHONORMAL_TOL = 1e-6


class MetricsError(Exception):
    pass


class NotOrthonormalError(MetricsError):
    pass


class ShapeMismatchError(MetricsError):
    pass


def orthonormality_gap(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    return float(np.max(np.abs(u.T @ u - np.eye(u.shape[1])))) if u.size else 0.0


def subspace_distance(u1: np.ndarray, u2: np.ndarray) -> float:
    """||(I - U1 U1^T) U2|| from the n x r residual and its r x r Gram matrix."""
    u1 = np.asarray(u1, dtype=np.float64)
    u2 = np.asarray(u2, dtype=np.float64)
    if u1.shape[0] != u2.shape[0]:
        raise ShapeMismatchError(f"Bases de dimension distinta: {u1.shape} vs {u2.shape}")
    for u in (u1, u2):
        if orthonormality_gap(u) > ORTHONORMAL_TOL:
            raise NotOrthonormalError("La base no es ortonormal")
    resid = u2 - u1 @ (u1.T @ u2)
    gram = resid.T @ resid
    top = sym_eig(0.5 * (gram + gram.T))[0][0]
    return float(math.sqrt(max(float(top), 0.0)))


def error_x(node_states: Sequence[NodeState], gt: GroundTruth) -> float:
    """||X - X*||_F / ||X*||_F with X assembled blockwise as U^(g) B_g."""
    x = np.zeros_like(np.asarray(gt.x_star, dtype=np.float64))
    for st in node_states:
        x[:, list(st.columns)] = st.u @ st.b
    denom = float(np.linalg.norm(gt.x_star))
    if denom == 0.0:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x - gt.x_star)) / denom


def node_disagreement(us: Sequence[np.ndarray]) -> float:
    best = 0.0
    for a, b in itertools.combinations(us, 2):
        best = max(best, float(np.linalg.norm(np.asarray(a) - np.asarray(b))))
    return best


def consensus_error(approx: Sequence[np.ndarray], exact_sum: np.ndarray) -> float:
    exact_sum = np.asarray(exact_sum, dtype=np.float64)
    worst = 0.0
    for z in approx:
        z = np.asarray(z, dtype=np.float64)
        if z.shape != exact_sum.shape:
            raise ShapeMismatchError(f"Forma {z.shape} distinta de {exact_sum.shape}")
        worst = max(worst, float(np.linalg.norm(z - exact_sum)))
    return worst
