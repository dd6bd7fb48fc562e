# -*- coding: utf-8 -*-
"""Comparison algorithms: centralized AltGDmin, DGD-AltGDmin and one-node AltGDmin."""
from __future__ import annotations

import logging
import time
from enum import Enum
from typing import List, Optional

import numpy as np

from domain.calculations.metrics import ORTHONORMAL_TOL, error_x, node_disagreement, orthonormality_gap, subspace_distance
from domain.entities.models import (
    ColumnPartition,
    GdConfig,
    GroundTruth,
    InitConfig,
    InitResult,
    MetricsTrace,
    Network,
    NodeState,
    TraceError,
)
from domain.numerics.linalg import NumericsError, is_full_rank, thin_qr
from domain.numerics.rng import RngStream, gaussian_matrix
from domain.services.gdmin import (
    GdminAbortedError,
    GdminError,
    estimate_sigma_max,
    local_gradient,
    min_step_b,
    run_dec_altgdmin,
)
from domain.services.network import single_node_network
from domain.services.problem import MeasurementSet, partition_columns, restrict_ground_truth
from domain.services.spectral_init import spectral_init
from infra.logging.event_logger import log_event


class BaselineKind(str, Enum):
    CENTRALIZED = "centralized"
    DGD_RAND = "dgd-rand"
    DGD_ZERO = "dgd-zero"
    DGD_SPECT = "dgd-spect"
    ONE_NODE = "one-node"

    @property
    def is_dgd(self) -> bool:
        return self in (BaselineKind.DGD_RAND, BaselineKind.DGD_ZERO, BaselineKind.DGD_SPECT)


def run_centralized_altgdmin(
    measurements: MeasurementSet,
    gt: GroundTruth,
    init_config: InitConfig,
    gd_config: GdConfig,
    init_stream: RngStream,
    trial_id: int = 0,
    algorithm_tag: str = BaselineKind.CENTRALIZED.value,
) -> MetricsTrace:
    """AltGDmin on one node holding every column; consensus is then an exact sum."""
    partition = partition_columns(measurements.q, 1)
    network = single_node_network()
    init = spectral_init(
        measurements, partition, network, init_config, init_stream, gt.r, gt.kappa, gt.mu, gt=gt
    )
    _, trace = run_dec_altgdmin(
        gt, measurements, partition, network, init, gd_config, algorithm_tag=algorithm_tag, trial_id=trial_id
    )
    return trace


def run_one_node_altgdmin(
    measurements: MeasurementSet,
    partition: ColumnPartition,
    gt: GroundTruth,
    init_config: InitConfig,
    gd_config: GdConfig,
    init_stream: RngStream,
    trial_id: int = 0,
) -> MetricsTrace:
    """Centralized AltGDmin restricted to the columns of node 0."""
    cols = partition.sets[0]
    return run_centralized_altgdmin(
        measurements.restrict(cols),
        restrict_ground_truth(gt, cols),
        init_config,
        gd_config,
        init_stream,
        trial_id=trial_id,
        algorithm_tag=BaselineKind.ONE_NODE.value,
    )


def dgd_initial_bases(
    kind: BaselineKind,
    n: int,
    r: int,
    L: int,
    stream: Optional[RngStream] = None,
    init_result: Optional[InitResult] = None,
) -> List[np.ndarray]:
    if kind == BaselineKind.DGD_ZERO:
        return [np.zeros((n, r)) for _ in range(L)]
    if kind == BaselineKind.DGD_RAND:
        if stream is None:
            raise GdminError("dgd-rand requiere un flujo aleatorio")
        return [thin_qr(gaussian_matrix(n, r, stream.substream(g)))[0] for g in range(L)]
    if kind == BaselineKind.DGD_SPECT:
        if init_result is None:
            raise GdminError("dgd-spect requiere la inicializacion espectral")
        return [np.array(u, dtype=np.float64, copy=True) for u in init_result.u0]
    raise GdminError(f"Modo DGD invalido: {kind}")


def neighbor_mix(us: List[np.ndarray], w_row: np.ndarray) -> np.ndarray:
    """sum_j W_gj U^(j) over the nonzero entries of row g, the node itself included."""
    idx = np.flatnonzero(np.asarray(w_row))
    if idx.size == 0:
        raise GdminError("Fila de pesos vacia")
    mixed = float(w_row[idx[0]]) * us[idx[0]]
    for j in idx[1:]:
        mixed = mixed + float(w_row[j]) * us[j]
    return mixed


def dgd_update(mixed: np.ndarray, grad: np.ndarray, eta: float) -> np.ndarray:
    """QR(mixed - eta grad); QR is skipped while the matrix is rank deficient."""
    raw = mixed - float(eta) * grad
    if is_full_rank(raw):
        return thin_qr(raw)[0]
    return raw


def _se2_or_one(u_star: np.ndarray, u: np.ndarray) -> float:
    if orthonormality_gap(u) > ORTHONORMAL_TOL:
        return 1.0
    return subspace_distance(u_star, u)


def run_dgd_altgdmin(
    measurements: MeasurementSet,
    partition: ColumnPartition,
    network: Network,
    kind: BaselineKind,
    gd_config: GdConfig,
    gt: GroundTruth,
    init_result: Optional[InitResult] = None,
    stream: Optional[RngStream] = None,
    trial_id: int = 0,
) -> MetricsTrace:
    """Weighted neighbor mixing plus a local gradient step.

    Node g mixes with row g of W and steps with its own eta_g. Under theorem-default
    sigma_max of node g comes from the power method it ran alone on its own block.
    """
    kind = BaselineKind(kind)
    if not kind.is_dgd:
        raise GdminError(f"{kind.value} no es una variante DGD")
    L = network.L
    T = int(gd_config.t)
    m = measurements.m_per_batch
    if gd_config.eta_mode == "theorem-default" and not gd_config.sigma_max_est:
        if init_result is None:
            raise GdminError("Se requiere sigma_max estimado para el paso theorem-default")
        factors = init_result.r_local or init_result.r_last
        gd_config = gd_config.with_sigma([estimate_sigma_max(rf) for rf in factors])
    etas = [gd_config.eta_for(g, m) for g in range(L)]

    cols = [list(s) for s in partition.sets]
    us = dgd_initial_bases(kind, gt.n, gt.r, L, stream=stream, init_result=init_result)
    trace = MetricsTrace(algorithm_tag=kind.value, trial_id=int(trial_id))
    bs: List[np.ndarray] = []

    elapsed = 0.0
    for t in range(1, T + 1):
        try:
            fit = measurements.batch(str(t))
            grad_batch = measurements.batch(str(T + t))
            start = time.perf_counter()
            bs = [min_step_b(us[g], fit.a[c], fit.y[c], on_singular="zero") for g, c in enumerate(cols)]
            grads = [local_gradient(us[g], bs[g], grad_batch.a[c], grad_batch.y[c]) for g, c in enumerate(cols)]
            new_us = [dgd_update(neighbor_mix(us, network.W[g]), grads[g], etas[g]) for g in range(L)]
            elapsed += time.perf_counter() - start
        except (NumericsError, GdminError) as exc:
            log_event("gd_aborted", f"{kind.value} ensayo={trial_id} iteracion={t}: {exc}", level=logging.WARNING)
            raise GdminAbortedError(f"Iteracion {t} fallida: {exc}", trace, t) from exc

        states = [NodeState(g, tuple(c), us[g], bs[g]) for g, c in enumerate(cols)]
        try:
            trace.append(
                iteration=t,
                elapsed_seconds=elapsed,
                error_x=error_x(states, gt),
                se2_node1=_se2_or_one(gt.u_star, new_us[0]),
                max_disagreement_frob=node_disagreement(new_us),
            )
        except TraceError as exc:
            log_event("gd_aborted", f"{kind.value} ensayo={trial_id} iteracion={t}: {exc}", level=logging.WARNING)
            raise GdminAbortedError(f"Metrica invalida en la iteracion {t}: {exc}", trace, t) from exc
        us = new_us
    return trace
