# -*- coding: utf-8 -*-
"""Monte Carlo experiments: trials, "auto" parameters, trace and summary files, sweeps."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from data.repositories.trace_store import write_table_csv, write_trace_csv
from domain.calculations.formatting import fmt_float
from domain.entities.models import GdConfig, InitConfig, MetricsTrace, Network, TraceError
from domain.numerics.linalg import NumericsError
from domain.numerics.rng import ALGORITHM_TAG, RngStream, fold_seed
from domain.services.baselines import (
    BaselineKind,
    run_centralized_altgdmin,
    run_dgd_altgdmin,
    run_one_node_altgdmin,
)
from domain.services.gdmin import GdminAbortedError, GdminError, run_dec_altgdmin
from domain.services.network import NetworkError, build_network, messages_per_consensus, t_con_for
from domain.services.problem import ProblemError, generate_ground_truth, generate_measurements, partition_columns
from domain.services.spectral_init import InitError, spectral_init
from infra.logging.event_logger import log_event
from infra.persistence.config_hash import config_hash
from infra.persistence.experiment_config import AUTO, ConfigInvalidError, ExperimentConfig

AUTO_C = 10.0
AUTO_C_RATE = 0.9
AUTO_T_CON_CAP = 200
AUTO_EPS_CON_MAX = 1e-2

STREAM_GROUND_TRUTH = 1
STREAM_MEASUREMENTS = 2
STREAM_INIT = 3
STREAM_DGD_RAND = 4
STREAM_NETWORK = 5

SWEEP_PARAMETERS = ("m", "t_con", "p_edge", "L", "trials")

SUMMARY_FIELDS = (
    "algorithm",
    "iteration",
    "trials_ok",
    "error_x_mean",
    "se2_node1_mean",
    "max_disagreement_frob_mean",
    "elapsed_seconds_mean",
    "messages_per_iteration",
)

SWEEP_FIELDS = (
    "parameter",
    "value",
    "algorithm",
    "trials_ok",
    "final_error_x_mean",
    "final_se2_mean",
    "gamma",
    "t_con",
    "messages_per_iteration",
)


class ExperimentError(Exception):
    pass


class AllTrialsFailedError(ExperimentError):
    pass


@dataclass(frozen=True)
class ResolvedParams:
    t: int
    t_pm: int
    t_con: int
    kappa: float
    gamma: float
    eps_con: Optional[float] = None
    auto_keys: Tuple[str, ...] = ()


@dataclass
class TrialOutcome:
    trial: int
    traces: List[MetricsTrace] = field(default_factory=list)
    failed: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.traces) and len(self.failed) == 0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    resolved: ResolvedParams
    network: Network
    outcomes: List[TrialOutcome]
    trace_path: Optional[Path] = None
    summary_path: Optional[Path] = None

    def complete_traces(self, algorithm: str) -> List[MetricsTrace]:
        out = []
        for oc in self.outcomes:
            if algorithm in oc.failed:
                continue
            out.extend(tr for tr in oc.traces if tr.algorithm_tag == algorithm)
        return out

    def final_means(self, algorithm: str) -> Tuple[int, float, float]:
        traces = [tr for tr in self.complete_traces(algorithm) if tr.final() is not None]
        if not traces:
            return 0, math.nan, math.nan
        err = float(np.mean([tr.final().error_x for tr in traces]))
        se2 = float(np.mean([tr.final().se2_node1 for tr in traces]))
        return len(traces), err, se2


def trial_seed(master_seed: int, trial: int) -> int:
    return fold_seed(master_seed, trial)


def experiment_network(config: ExperimentConfig) -> Network:
    """One graph per experiment, drawn from the master seed only."""
    return build_network(
        config.L, config.p_edge, RngStream(config.master_seed, STREAM_NETWORK), scheme=config.weight_scheme
    )


def resolve_auto(config: ExperimentConfig, network: Network) -> ResolvedParams:
    """Replace "auto" counts with the prescriptions driven by kappa (trial 0) and gamma(W)."""
    seed0 = trial_seed(config.master_seed, 0)
    kappa = generate_ground_truth(config.n, config.q, config.r, RngStream(seed0, STREAM_GROUND_TRUTH)).kappa
    k2 = kappa * kappa
    auto_keys = tuple(k for k in ("t", "t_pm", "t_con") if getattr(config, k) == AUTO)

    t = config.t
    if t == AUTO:
        t = max(1, int(math.ceil(AUTO_C * k2 * math.log(1.0 / config.eps_fin))))
    t_pm = config.t_pm
    if t_pm == AUTO:
        t_pm = max(1, int(math.ceil(AUTO_C * k2 * (math.log(config.n) + math.log(kappa)))))
    t_con = config.t_con
    eps_con = None
    if t_con == AUTO:
        eps_con = min(AUTO_EPS_CON_MAX, config.eps_fin * AUTO_C_RATE ** t / (t * k2))
        eps_con = max(eps_con, np.finfo(float).tiny)
        t_con = min(AUTO_T_CON_CAP, t_con_for(eps_con, network.gamma, network.L))

    resolved = ResolvedParams(
        t=int(t), t_pm=int(t_pm), t_con=int(t_con), kappa=float(kappa), gamma=float(network.gamma),
        eps_con=eps_con, auto_keys=auto_keys,
    )
    if auto_keys:
        log_event(
            "auto_resolved",
            f"{config.name}: t={resolved.t} t_pm={resolved.t_pm} t_con={resolved.t_con} "
            f"kappa={kappa:.4g} gamma={network.gamma:.4g} eps_con={eps_con}",
            level=logging.INFO,
        )
    return resolved


def messages_per_iteration(algorithm: str, network: Network, resolved: ResolvedParams, exact: bool) -> int:
    if algorithm == "dec-altgdmin":
        return 0 if exact else messages_per_consensus(network, resolved.t_con)
    if BaselineKind(algorithm).is_dgd:
        return messages_per_consensus(network, 1)
    return 0


def run_trial(
    config: ExperimentConfig, resolved: ResolvedParams, network: Network, trial: int
) -> TrialOutcome:
    outcome = TrialOutcome(trial=trial)
    seed = trial_seed(config.master_seed, trial)
    log_event("trial_start", f"{config.name} ensayo={trial} semilla={seed}")
    try:
        gt = generate_ground_truth(config.n, config.q, config.r, RngStream(seed, STREAM_GROUND_TRUTH))
        meas = generate_measurements(
            gt, config.m, resolved.t, RngStream(seed, STREAM_MEASUREMENTS),
            sample_split=config.sample_split, mode=config.measurement_mode,
        )
        partition = partition_columns(config.q, config.L)
        init_stream = RngStream(seed, STREAM_INIT)
        init_config = InitConfig(
            variant=config.init_variant, t_pm=resolved.t_pm, t_con=resolved.t_con,
            exact_consensus=config.exact_consensus,
        )
        gd_config = GdConfig(
            t=resolved.t, t_con=resolved.t_con, eta_mode=config.eta_mode, eta=config.eta or 0.0,
            exact_consensus=config.exact_consensus, sample_split=config.sample_split,
            diagnostics=config.diagnostics,
        )
        init = None
        if any(a == "dec-altgdmin" or a.startswith("dgd-") for a in config.algorithms):
            init = spectral_init(meas, partition, network, init_config, init_stream, gt.r, gt.kappa, gt.mu, gt=gt)
    except (ProblemError, NetworkError, InitError, NumericsError, TraceError, ValueError) as exc:
        for algo in config.algorithms:
            outcome.failed[algo] = str(exc)
        log_event("trial_failed", f"{config.name} ensayo={trial}: {exc}", level=logging.WARNING)
        return outcome

    for algo in config.algorithms:
        try:
            if algo == "dec-altgdmin":
                _, trace = run_dec_altgdmin(gt, meas, partition, network, init, gd_config, trial_id=trial)
            elif algo == "centralized":
                trace = run_centralized_altgdmin(meas, gt, init_config, gd_config, init_stream, trial_id=trial)
            elif algo == "one-node":
                trace = run_one_node_altgdmin(meas, partition, gt, init_config, gd_config, init_stream, trial_id=trial)
            else:
                trace = run_dgd_altgdmin(
                    meas, partition, network, BaselineKind(algo), gd_config, gt,
                    init_result=init, stream=RngStream(seed, STREAM_DGD_RAND), trial_id=trial,
                )
            outcome.traces.append(trace)
        except GdminAbortedError as exc:
            outcome.traces.append(exc.trace)
            outcome.failed[algo] = str(exc)
            log_event("trial_failed", f"{config.name} ensayo={trial} {algo}: {exc}", level=logging.WARNING)
        except (GdminError, InitError, NumericsError, ProblemError, NetworkError, TraceError, ValueError) as exc:
            outcome.failed[algo] = str(exc)
            log_event("trial_failed", f"{config.name} ensayo={trial} {algo}: {exc}", level=logging.WARNING)

    finals = ", ".join(
        f"{tr.algorithm_tag}={tr.final().error_x:.3e}" for tr in outcome.traces if tr.final() is not None
    )
    log_event("trial_done", f"{config.name} ensayo={trial} {finals}")
    return outcome


def header_items(config: ExperimentConfig, resolved: ResolvedParams, network: Network) -> Dict[str, Any]:
    return {
        "name": config.name,
        "config_hash": config_hash(config),
        "rng": ALGORITHM_TAG,
        "t": resolved.t,
        "t_pm": resolved.t_pm,
        "t_con": resolved.t_con,
        "auto": ",".join(resolved.auto_keys) or "-",
        "kappa_trial0": fmt_float(resolved.kappa),
        "gamma": fmt_float(resolved.gamma),
        "eps_con": "-" if resolved.eps_con is None else fmt_float(resolved.eps_con),
        "network_attempt": network.attempt,
        "edges": len(network.edges),
    }


def summary_rows(result: ExperimentResult) -> List[List[str]]:
    rows: List[List[str]] = []
    cfg = result.config
    for algo in cfg.algorithms:
        traces = result.complete_traces(algo)
        if not traces:
            continue
        msgs = messages_per_iteration(algo, result.network, result.resolved, cfg.exact_consensus)
        by_iter: Dict[int, List[Any]] = {}
        for tr in traces:
            for rec in tr.records:
                by_iter.setdefault(rec.iteration, []).append(rec)
        for it in sorted(by_iter):
            recs = by_iter[it]
            rows.append([
                algo,
                str(it),
                str(len(recs)),
                fmt_float(np.mean([r.error_x for r in recs])),
                fmt_float(np.mean([r.se2_node1 for r in recs])),
                fmt_float(np.mean([r.max_disagreement_frob for r in recs])),
                fmt_float(np.mean([r.elapsed_seconds for r in recs])),
                str(msgs),
            ])
    return rows


def run_experiment(config: ExperimentConfig, out_dir: Optional[Path] = None) -> ExperimentResult:
    """Run every trial and, when ``out_dir`` is given, write the trace and summary CSVs.

    Rows are ordered by trial, then by algorithm as listed in the config, whatever the
    number of workers.
    """
    network = experiment_network(config)
    resolved = resolve_auto(config, network)
    trials = list(range(config.trials))
    if config.workers > 1 and len(trials) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(lambda k: run_trial(config, resolved, network, k), trials))
    else:
        outcomes = [run_trial(config, resolved, network, k) for k in trials]

    result = ExperimentResult(config=config, resolved=resolved, network=network, outcomes=outcomes)
    if out_dir is not None:
        out_dir = Path(out_dir)
        header = header_items(config, resolved, network)
        records = [rec for oc in outcomes for tr in oc.traces for rec in tr.records]
        result.trace_path = write_trace_csv(out_dir / f"{config.name}.csv", records, header)
        result.summary_path = write_table_csv(
            out_dir / f"{config.name}_summary.csv", SUMMARY_FIELDS, summary_rows(result), header
        )
        log_event("trace_written", f"{result.trace_path}", level=logging.INFO)

    n_failed = sum(1 for oc in outcomes if not oc.ok)
    if n_failed:
        log_event("trials_failed", f"{config.name}: {n_failed}/{len(outcomes)} ensayos con fallas", level=logging.WARNING)
    if all(not oc.traces or len(oc.failed) == len(config.algorithms) for oc in outcomes):
        raise AllTrialsFailedError(f"Todos los ensayos fallaron en {config.name}")
    return result


def _cell_name(name: str, parameter: str, value: Any) -> str:
    return f"{name}_{parameter}-{value}"


def sweep(
    config: ExperimentConfig,
    parameter: str,
    values: Sequence[Any],
    out_dir: Optional[Path] = None,
) -> List[ExperimentResult]:
    """One experiment per value (same master seed in every cell) plus a joined summary."""
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigInvalidError(f"Parametro de barrido invalido: {parameter}")
    values = list(values)
    if not values:
        raise ConfigInvalidError("La lista de valores esta vacia")
    cells = [
        config.with_overrides(**{parameter: v, "name": _cell_name(config.name, parameter, v)}) for v in values
    ]

    results: List[ExperimentResult] = []
    rows: List[List[str]] = []
    for value, cell in zip(values, cells):
        try:
            res = run_experiment(cell, out_dir)
        except AllTrialsFailedError as exc:
            log_event("sweep_cell_failed", str(exc), level=logging.WARNING)
            continue
        results.append(res)
        for algo in cell.algorithms:
            ok, err, se2 = res.final_means(algo)
            rows.append([
                parameter,
                str(value),
                algo,
                str(ok),
                fmt_float(err) if ok else "",
                fmt_float(se2) if ok else "",
                fmt_float(res.resolved.gamma),
                str(res.resolved.t_con),
                str(messages_per_iteration(algo, res.network, res.resolved, cell.exact_consensus)),
            ])
    if not results:
        raise AllTrialsFailedError(f"Todas las celdas del barrido fallaron en {config.name}")
    if out_dir is not None:
        path = write_table_csv(
            Path(out_dir) / f"{config.name}_sweep.csv", SWEEP_FIELDS, rows,
            {"name": config.name, "config_hash": config_hash(config), "parameter": parameter},
        )
        log_event("trace_written", f"{path}", level=logging.INFO)
    return results
