# -*- coding: utf-8 -*-
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

WEIGHT_SCHEMES = ("metropolis", "equal-neighbor")
INIT_VARIANTS = ("two-loop", "one-loop")
ETA_MODES = ("theorem-default", "fixed")


class TraceError(Exception):
    pass


@dataclass(frozen=True)
class GroundTruth:
    n: int
    q: int
    r: int
    u_star: np.ndarray
    b_star: np.ndarray
    x_star: np.ndarray
    sigma_max: float
    sigma_min: float
    kappa: float
    mu: float


@dataclass(frozen=True)
class ColumnPartition:
    sets: Tuple[Tuple[int, ...], ...]

    @property
    def L(self) -> int:
        return len(self.sets)

    @property
    def q(self) -> int:
        return sum(len(s) for s in self.sets)


@dataclass(frozen=True)
class Network:
    """Communication graph. Nodes are 0-based; node 0 plays the role of "node-1"."""

    L: int
    edges: FrozenSet[Tuple[int, int]]
    degrees: np.ndarray
    weight_scheme: str
    W: np.ndarray
    gamma: float
    attempt: int = 0

    def neighbors(self, g: int) -> List[int]:
        out = [b if a == g else a for a, b in self.edges if g in (a, b)]
        return sorted(out)


@dataclass
class NodeState:
    node_id: int
    columns: Tuple[int, ...]
    u: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class InitConfig:
    variant: str = "two-loop"
    t_pm: int = 50
    t_con: int = 30
    trunc_constant: Optional[float] = None
    exact_consensus: bool = False

    def __post_init__(self) -> None:
        if self.variant not in INIT_VARIANTS:
            raise ValueError(f"variant invalido: {self.variant}")
        if int(self.t_pm) < 0:
            raise ValueError("t_pm debe ser >= 0")
        if int(self.t_con) < 1 and not self.exact_consensus:
            raise ValueError("t_con debe ser >= 1")
        if self.trunc_constant is not None and float(self.trunc_constant) < 0:
            raise ValueError("trunc_constant debe ser >= 0")


@dataclass(frozen=True)
class InitResult:
    u0: Tuple[np.ndarray, ...]
    r_last: Tuple[np.ndarray, ...]
    alpha: Tuple[float, ...]
    # R factors of a power method each node runs on its own X0 block alone
    r_local: Tuple[np.ndarray, ...] = ()


@dataclass(frozen=True)
class GdConfig:
    t: int
    t_con: int = 30
    eta_mode: str = "theorem-default"
    eta: float = 0.0
    sigma_max_est: Tuple[float, ...] = ()
    c_eta: float = 0.4
    exact_consensus: bool = False
    sample_split: bool = True
    diagnostics: bool = False

    def __post_init__(self) -> None:
        if int(self.t) < 1:
            raise ValueError("t debe ser >= 1")
        if self.eta_mode not in ETA_MODES:
            raise ValueError(f"eta_mode invalido: {self.eta_mode}")
        if self.eta_mode == "fixed" and not float(self.eta) > 0.0:
            raise ValueError("eta debe ser > 0 en modo fijo")
        if int(self.t_con) < 0:
            raise ValueError("t_con debe ser >= 0")

    def with_sigma(self, estimates: Sequence[float]) -> "GdConfig":
        return replace(self, sigma_max_est=tuple(float(s) for s in estimates))

    def eta_for(self, node: int, m: int) -> float:
        if self.eta_mode == "fixed":
            return float(self.eta)
        if not self.sigma_max_est:
            raise ValueError("Falta la estimacion de sigma_max para el paso theorem-default")
        sigma = self.sigma_max_est[node] if node < len(self.sigma_max_est) else self.sigma_max_est[0]
        if not sigma > 0.0:
            raise ValueError("sigma_max estimado debe ser > 0")
        return self.c_eta / (float(m) * sigma * sigma)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    elapsed_seconds: float
    error_x: float
    se2_node1: float
    max_disagreement_frob: float
    cons_err_max: Optional[float] = None
    algorithm_tag: str = ""
    trial_id: int = 0


@dataclass
class MetricsTrace:
    algorithm_tag: str = ""
    trial_id: int = 0
    records: List[TraceRecord] = field(default_factory=list)

    def append(
        self,
        iteration: int,
        elapsed_seconds: float,
        error_x: float,
        se2_node1: float,
        max_disagreement_frob: float,
        cons_err_max: Optional[float] = None,
    ) -> TraceRecord:
        if self.records and iteration <= self.records[-1].iteration:
            raise TraceError(f"Iteracion {iteration} no es creciente")
        values = [elapsed_seconds, error_x, se2_node1, max_disagreement_frob]
        if cons_err_max is not None:
            values.append(cons_err_max)
        for v in values:
            if not math.isfinite(v) or v < 0.0:
                raise TraceError(f"Metrica invalida en iteracion {iteration}: {v}")
        rec = TraceRecord(
            iteration=int(iteration),
            elapsed_seconds=float(elapsed_seconds),
            error_x=float(error_x),
            se2_node1=float(se2_node1),
            max_disagreement_frob=float(max_disagreement_frob),
            cons_err_max=None if cons_err_max is None else float(cons_err_max),
            algorithm_tag=self.algorithm_tag,
            trial_id=self.trial_id,
        )
        self.records.append(rec)
        return rec

    def final(self) -> Optional[TraceRecord]:
        return self.records[-1] if self.records else None

    def __len__(self) -> int:
        return len(self.records)
