# -*- coding: utf-8 -*-
"""Decentralized truncated spectral initialization.

The threshold is agreed on by consensus (batch ``00``), each node builds its block of
X0 from the truncated batch ``0`` and a consensus power method on sum_g X0_g X0_g^T
yields the starting bases. Two variants:

* ``one-loop``: every node orthonormalizes its own consensus output.
* ``two-loop``: only node 0 orthonormalizes; a second consensus round carries its
  basis to the others.
"""
from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from domain.entities.models import ColumnPartition, GroundTruth, InitConfig, InitResult, Network
from domain.numerics.linalg import RankDeficientError, sym_eig, thin_qr
from domain.numerics.rng import RngStream, gaussian_matrix
from domain.services.network import consensus_sum
from domain.services.problem import MeasurementSet
from infra.logging.event_logger import log_event

INIT_CHECK_C1 = 0.1


class InitError(Exception):
    pass


class RankCollapseError(InitError):
    def __init__(self, message: str, node: int = -1, iteration: int = -1) -> None:
        super().__init__(message)
        self.node = int(node)
        self.iteration = int(iteration)


def truncation_constant(kappa: float, mu: float) -> float:
    return 9.0 * float(kappa) ** 2 * float(mu) ** 2


def local_alpha(
    y_block: np.ndarray,
    kappa: float,
    mu: float,
    m: int,
    q: int,
    trunc_constant: Optional[float] = None,
) -> float:
    y_block = np.asarray(y_block, dtype=np.float64)
    if y_block.size == 0:
        raise InitError("Bloque de mediciones vacio")
    c = truncation_constant(kappa, mu) if trunc_constant is None else float(trunc_constant)
    return c * float(np.sum(y_block * y_block)) / (float(m) * float(q))


def consensus_alpha(
    local_alphas: Sequence[float], network: Network, t_con: int, exact: bool = False
) -> List[float]:
    payloads = [np.asarray(float(a)) for a in local_alphas]
    return [float(v) for v in consensus_sum(payloads, network, t_con, exact=exact)]


def truncate_measurements(y: np.ndarray, alpha: float) -> np.ndarray:
    alpha = float(alpha)
    if alpha < 0.0:
        raise InitError(f"Umbral negativo: {alpha}")
    y = np.asarray(y, dtype=np.float64)
    return np.where(y * y <= alpha, y, 0.0)


def init_x0_block(a: np.ndarray, y_trunc: np.ndarray) -> np.ndarray:
    """Column k is (1/m) A_k^T y_trunc_k; ``a`` is (k, m, n), result is (n, k)."""
    a = np.asarray(a, dtype=np.float64)
    m = a.shape[1]
    return np.einsum("kmi,km->ik", a, np.asarray(y_trunc, dtype=np.float64)) / float(m)


def truncated_energy_ratio(y_block: np.ndarray, alpha: float) -> np.ndarray:
    """Per column share of sum y^2 kept by the truncation (1 for an all-zero column)."""
    y_block = np.atleast_2d(np.asarray(y_block, dtype=np.float64))
    sq = y_block * y_block
    total = sq.sum(axis=-1)
    kept = np.where(sq <= float(alpha), sq, 0.0).sum(axis=-1)
    return np.where(total > 0.0, kept / np.where(total > 0.0, total, 1.0), 1.0)


def init_check(u_star: np.ndarray, u_init: np.ndarray) -> float:
    """sigma_min(U*^T U_init)."""
    g = np.asarray(u_star, dtype=np.float64).T @ np.asarray(u_init, dtype=np.float64)
    smallest = sym_eig(g.T @ g)[0][-1]
    return float(math.sqrt(max(float(smallest), 0.0)))


def _qr(m: np.ndarray, node: int, iteration: int) -> Tuple[np.ndarray, np.ndarray]:
    try:
        return thin_qr(m)
    except RankDeficientError as exc:
        raise RankCollapseError(
            f"Colapso de rango en nodo {node}, iteracion {iteration}", node=node, iteration=iteration
        ) from exc


def shared_initial_basis(n: int, r: int, stream: RngStream) -> Tuple[np.ndarray, np.ndarray]:
    return _qr(gaussian_matrix(n, r, stream), node=0, iteration=0)


def dec_power_method(
    x0_blocks: Sequence[np.ndarray],
    network: Network,
    config: InitConfig,
    stream: RngStream,
    r: int,
    alpha: Sequence[float] = (),
) -> InitResult:
    L = network.L
    if len(x0_blocks) != L:
        raise InitError(f"Se esperaban {L} bloques, hay {len(x0_blocks)}")
    n = np.shape(x0_blocks[0])[0]
    u_init, r_init = shared_initial_basis(n, int(r), stream)
    us = [u_init.copy() for _ in range(L)]
    rs = [r_init.copy() for _ in range(L)]
    local_us = [u_init.copy() for _ in range(L)]
    local_rs = [r_init.copy() for _ in range(L)]

    for it in range(1, int(config.t_pm) + 1):
        products = [x @ (x.T @ u) for x, u in zip(x0_blocks, us)]
        summed = consensus_sum(products, network, config.t_con, exact=config.exact_consensus)
        if L > 1:
            for g, x in enumerate(x0_blocks):
                try:
                    local_us[g], local_rs[g] = thin_qr(x @ (x.T @ local_us[g]))
                except RankDeficientError:
                    pass
        if config.variant == "one-loop":
            for g in range(L):
                us[g], rs[g] = _qr(summed[g], node=g, iteration=it)
            continue

        us[0], rs[0] = _qr(summed[0], node=0, iteration=it)
        for g in range(1, L):
            # only feeds the step-size estimate of node g
            try:
                rs[g] = thin_qr(summed[g])[1]
            except RankDeficientError:
                rs[g] = rs[0].copy()
        if L > 1:
            payload = [us[0]] + [np.zeros_like(us[0]) for _ in range(L - 1)]
            shared = consensus_sum(payload, network, config.t_con, exact=config.exact_consensus)
            for g in range(1, L):
                us[g] = shared[g]

    alphas = tuple(float(a) for a in alpha) if alpha else tuple(0.0 for _ in range(L))
    r_local = tuple(rs) if L == 1 else tuple(local_rs)
    return InitResult(u0=tuple(us), r_last=tuple(rs), alpha=alphas, r_local=r_local)


def spectral_init(
    measurements: MeasurementSet,
    partition: ColumnPartition,
    network: Network,
    config: InitConfig,
    stream: RngStream,
    r: int,
    kappa: float,
    mu: float,
    gt: Optional[GroundTruth] = None,
) -> InitResult:
    """Threshold consensus, truncation, X0 blocks and the consensus power method."""
    if partition.L != network.L:
        raise InitError("La particion y la red no tienen el mismo numero de nodos")
    m = measurements.m_per_batch
    q = measurements.q

    y00 = measurements.batch("00").y
    local = [
        local_alpha(y00[list(cols)], kappa, mu, m, q, config.trunc_constant)
        for cols in partition.sets
    ]
    alphas = consensus_alpha(local, network, config.t_con, exact=config.exact_consensus)

    b0 = measurements.batch("0")
    blocks = []
    for g, cols in enumerate(partition.sets):
        idx = list(cols)
        blocks.append(init_x0_block(b0.a[idx], truncate_measurements(b0.y[idx], alphas[g])))

    if config.variant == "one-loop" and gt is not None:
        value = init_check(gt.u_star, shared_initial_basis(gt.n, int(r), stream)[0])
        level = logging.INFO if value >= INIT_CHECK_C1 else logging.WARNING
        log_event("init_check", f"sigma_min(U*^T U_init)={value:.4g} (c1={INIT_CHECK_C1})", level=level)

    return dec_power_method(blocks, network, config, stream, r, alpha=alphas)
