# -*- coding: utf-8 -*-
"""Dec-AltGDmin iteration engine.

Each GD iteration ``t`` (1..T) every node
  1. solves the column-wise least squares for B_g on batch ``t``,
  2. forms its local gradient on batch ``T + t``,
  3. runs gradient consensus (AvgCons, or the exact sum),
  4. takes a projected gradient step and re-orthonormalizes with QR.

The gradient is sum_k A_k^T (A_k U b_k - y_k) b_k^T, without the factor 2 of the
derivative of sum ||y - A U b||^2; the step size absorbs it.
"""
from __future__ import annotations

import logging
import time
from typing import List, Optional, Set, Tuple

import numpy as np

from domain.calculations.metrics import consensus_error, error_x, node_disagreement, subspace_distance
from domain.entities.models import (
    ColumnPartition,
    GdConfig,
    GroundTruth,
    InitResult,
    MetricsTrace,
    Network,
    NodeState,
    TraceError,
)
from domain.numerics.linalg import NumericsError, RankDeficientError, least_squares, thin_qr
from domain.services.network import NetworkError, consensus_sum
from domain.services.problem import MeasurementSet
from domain.services.spectral_init import RankCollapseError
from infra.logging.event_logger import log_event

PROGRESS_EVERY = 50


class GdminError(Exception):
    pass


class SampleReuseError(GdminError):
    pass


class GdminAbortedError(GdminError):
    """An iteration failed; ``trace`` holds the records written before it."""

    def __init__(self, message: str, trace: MetricsTrace, iteration: int) -> None:
        super().__init__(message)
        self.trace = trace
        self.iteration = int(iteration)


def _project(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    return np.einsum("kmi,ir->kmr", a, u)


def min_step_b(u: np.ndarray, a: np.ndarray, y: np.ndarray, on_singular: str = "raise") -> np.ndarray:
    """b_k = (A_k U)^+ y_k for every column of the block; returns r x |S_g|.

    ``a`` is (k, m, n) and ``y`` is (k, m).
    """
    b = least_squares(_project(u, a), y, on_singular=on_singular)
    return np.ascontiguousarray(b.T)


def local_gradient(u: np.ndarray, b: np.ndarray, a: np.ndarray, y: np.ndarray) -> np.ndarray:
    resid = np.einsum("kmr,rk->km", _project(u, a), b) - y
    back = np.einsum("kmi,km->ki", a, resid)
    return back.T @ b.T


def gd_step(u: np.ndarray, grad: np.ndarray, eta: float) -> np.ndarray:
    if not float(eta) > 0.0:
        raise GdminError(f"Paso eta debe ser > 0: {eta}")
    try:
        return thin_qr(u - float(eta) * grad)[0]
    except RankDeficientError as exc:
        raise RankCollapseError("Colapso de rango en el paso de gradiente") from exc


def estimate_sigma_max(r_factor: np.ndarray) -> float:
    """sqrt of the largest diagonal entry of the last power-method R factor."""
    d = np.diag(np.atleast_2d(np.asarray(r_factor, dtype=np.float64)))
    if d.size == 0:
        raise GdminError("Factor R vacio")
    return float(np.sqrt(max(float(d.max()), 0.0)))


def predicted_se2_bound(delta0: float, kappa: float, t: int, c_eta: float = 0.4) -> float:
    return float(delta0) * (1.0 - 0.6 * float(c_eta) / float(kappa) ** 2) ** int(t)


def disagreement_recursion(
    rho0: float, kappa: float, eps_con: float, t: int, c_eta: float = 0.4
) -> List[float]:
    """rho_0, ..., rho_t with rho_{s+1} = 1.7 (rho_s + 3 kappa^2 c_eta eps_con)."""
    out = [float(rho0)]
    for _ in range(int(t)):
        out.append(1.7 * (out[-1] + 3.0 * float(kappa) ** 2 * float(c_eta) * float(eps_con)))
    return out


def _claim(used: Set[int], key: int, label: str) -> None:
    if key in used:
        raise SampleReuseError(f"El lote {label} ya fue usado")
    used.add(key)


def run_dec_altgdmin(
    gt: Optional[GroundTruth],
    measurements: MeasurementSet,
    partition: ColumnPartition,
    network: Network,
    init_result: InitResult,
    config: GdConfig,
    algorithm_tag: str = "dec-altgdmin",
    trial_id: int = 0,
) -> Tuple[List[NodeState], MetricsTrace]:
    """Run T iterations and return the final node states and the per-iteration trace.

    Without ground truth no records are written; only the final states are meaningful.
    """
    L = network.L
    if partition.L != L or len(init_result.u0) != L:
        raise GdminError("Particion, red e inicializacion con distinto numero de nodos")
    if config.sample_split and not measurements.sample_split:
        raise GdminError("sample_split requiere mediciones divididas en lotes")
    T = int(config.t)
    if measurements.T < T:
        raise GdminError(f"Las mediciones cubren T={measurements.T} < {T}")
    m = measurements.m_per_batch

    if config.eta_mode == "theorem-default" and not config.sigma_max_est:
        config = config.with_sigma([estimate_sigma_max(rf) for rf in init_result.r_last])
    etas = [config.eta_for(g, m) for g in range(L)]

    cols = [list(s) for s in partition.sets]
    us = [np.array(u, dtype=np.float64, copy=True) for u in init_result.u0]
    bs: List[np.ndarray] = [np.zeros((us[0].shape[1], len(c))) for c in cols]
    trace = MetricsTrace(algorithm_tag=algorithm_tag, trial_id=int(trial_id))

    used: Set[int] = set()
    if config.sample_split:
        _claim(used, measurements.batch_key("00"), "00")
        _claim(used, measurements.batch_key("0"), "0")

    elapsed = 0.0
    for t in range(1, T + 1):
        try:
            if config.sample_split:
                _claim(used, measurements.batch_key(str(t)), str(t))
                _claim(used, measurements.batch_key(str(T + t)), str(T + t))
            fit = measurements.batch(str(t))
            grad_batch = measurements.batch(str(T + t))

            start = time.perf_counter()
            bs = [min_step_b(us[g], fit.a[c], fit.y[c]) for g, c in enumerate(cols)]
            grads = [local_gradient(us[g], bs[g], grad_batch.a[c], grad_batch.y[c]) for g, c in enumerate(cols)]
            summed = consensus_sum(grads, network, config.t_con, exact=config.exact_consensus)
            new_us = [gd_step(us[g], summed[g], etas[g]) for g in range(L)]
            elapsed += time.perf_counter() - start
        except (NumericsError, NetworkError, GdminError, RankCollapseError) as exc:
            log_event("gd_aborted", f"{algorithm_tag} ensayo={trial_id} iteracion={t}: {exc}", level=logging.WARNING)
            raise GdminAbortedError(f"Iteracion {t} fallida: {exc}", trace, t) from exc

        if gt is not None:
            states = [NodeState(g, tuple(c), us[g], bs[g]) for g, c in enumerate(cols)]
            cons = None
            if config.diagnostics:
                cons = consensus_error(summed, np.sum(np.stack(grads), axis=0))
            try:
                trace.append(
                    iteration=t,
                    elapsed_seconds=elapsed,
                    error_x=error_x(states, gt),
                    se2_node1=subspace_distance(gt.u_star, new_us[0]),
                    max_disagreement_frob=node_disagreement(new_us),
                    cons_err_max=cons,
                )
            except TraceError as exc:
                log_event("gd_aborted", f"{algorithm_tag} ensayo={trial_id} iteracion={t}: {exc}", level=logging.WARNING)
                raise GdminAbortedError(f"Metrica invalida en la iteracion {t}: {exc}", trace, t) from exc
        us = new_us
        if t % PROGRESS_EVERY == 0:
            last = trace.final()
            msg = f"{algorithm_tag} ensayo={trial_id} t={t}/{T}"
            if last is not None:
                msg += f" error_x={last.error_x:.3e}"
            log_event("gd_progress", msg)

    final = [NodeState(g, tuple(c), us[g], bs[g]) for g, c in enumerate(cols)]
    return final, trace
