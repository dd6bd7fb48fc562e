# -*- coding: utf-8 -*-
"""Planted low-rank instances and their column-wise Gaussian sketches."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from domain.entities.models import ColumnPartition, GroundTruth
from domain.numerics.linalg import sym_eig, thin_qr
from domain.numerics.rng import RngStream, gaussian_matrix

MEASUREMENT_MODES = ("materialized", "on-demand", "auto")
AUTO_ON_DEMAND_DOUBLES = 5e7


class ProblemError(Exception):
    pass


class InvalidDimensionsError(ProblemError):
    pass


class TooManyNodesError(ProblemError):
    pass


def incoherence_mu(gt: GroundTruth) -> float:
    """Smallest mu with ||b*_k||^2 <= mu^2 r sigma_max^2 / q for every column."""
    if gt.sigma_max <= 0.0:
        return 0.0
    col_energy = np.sum(np.asarray(gt.b_star) ** 2, axis=0)
    return float(math.sqrt(gt.q * float(col_energy.max()) / (gt.r * gt.sigma_max ** 2)))


def ground_truth_from_factors(u_star: np.ndarray, b_star: np.ndarray) -> GroundTruth:
    u_star = np.asarray(u_star, dtype=np.float64)
    b_star = np.asarray(b_star, dtype=np.float64)
    n, r = u_star.shape
    if b_star.shape[0] != r:
        raise InvalidDimensionsError(f"B* debe tener {r} filas, tiene {b_star.shape[0]}")
    q = b_star.shape[1]
    eigenvalues = sym_eig(b_star @ b_star.T)[0]
    sigma_max = math.sqrt(max(float(eigenvalues[0]), 0.0))
    sigma_min = math.sqrt(max(float(eigenvalues[-1]), 0.0))
    kappa = sigma_max / sigma_min if sigma_min > 0.0 else math.inf
    gt = GroundTruth(
        n=n,
        q=q,
        r=r,
        u_star=u_star,
        b_star=b_star,
        x_star=u_star @ b_star,
        sigma_max=sigma_max,
        sigma_min=sigma_min,
        kappa=kappa,
        mu=0.0,
    )
    return replace(gt, mu=incoherence_mu(gt))


def generate_ground_truth(n: int, q: int, r: int, stream: RngStream) -> GroundTruth:
    n, q, r = int(n), int(q), int(r)
    if not (1 <= r <= min(n, q)):
        raise InvalidDimensionsError(f"Se requiere 1 <= r <= min(n, q); n={n}, q={q}, r={r}")
    u_star, _ = thin_qr(gaussian_matrix(n, r, stream.substream(0)))
    b_star = gaussian_matrix(r, q, stream.substream(1))
    return ground_truth_from_factors(u_star, b_star)


def restrict_ground_truth(gt: GroundTruth, columns: Sequence[int]) -> GroundTruth:
    """Same U*, only the given columns of B*; sigma, kappa and mu are recomputed."""
    cols = list(columns)
    return ground_truth_from_factors(gt.u_star, gt.b_star[:, cols])


def partition_columns(q: int, L: int) -> ColumnPartition:
    q, L = int(q), int(L)
    if L < 1 or L > q:
        raise TooManyNodesError(f"Se requiere 1 <= L <= q; q={q}, L={L}")
    base, extra = divmod(q, L)
    sets = []
    start = 0
    for g in range(L):
        size = base + (1 if g < extra else 0)
        sets.append(tuple(range(start, start + size)))
        start += size
    return ColumnPartition(sets=tuple(sets))


def batch_labels(T: int) -> List[str]:
    return ["00", "0"] + [str(t) for t in range(1, 2 * int(T) + 1)]


def label_index(label: str) -> int:
    label = str(label)
    if label == "00":
        return 0
    return int(label) + 1


@dataclass(frozen=True)
class MeasurementBatch:
    label: str
    a: np.ndarray  # (q, m, n): a[k] is A_k
    y: np.ndarray  # (q, m)


class MeasurementSet:
    """2T+2 labelled batches (00, 0, 1, ..., 2T) of per-column sketches.

    Batch ``l`` is drawn from substream ``label_index(l)`` of the measurement stream, so a
    regenerated batch is bit-identical to a stored one. With ``sample_split=False`` one
    batch is drawn and every label resolves to it.
    """

    def __init__(
        self,
        x_star: np.ndarray,
        m: int,
        T: int,
        stream: RngStream,
        sample_split: bool = True,
        mode: str = "auto",
        columns: Optional[Sequence[int]] = None,
    ) -> None:
        if int(m) < 1 or int(T) < 1:
            raise InvalidDimensionsError("Se requiere m >= 1 y T >= 1")
        if mode not in MEASUREMENT_MODES:
            raise ProblemError(f"Modo de mediciones invalido: {mode}")
        self._x_star = np.asarray(x_star, dtype=np.float64)
        self.n, self._q_full = self._x_star.shape
        self.m_per_batch = int(m)
        self.T = int(T)
        self.stream = stream
        self.sample_split = bool(sample_split)
        self._columns = None if columns is None else np.asarray(list(columns), dtype=np.int64)
        self.labels = batch_labels(self.T)
        n_batches = len(self.labels) if self.sample_split else 1
        if mode == "auto":
            doubles = float(n_batches) * self._q_full * self.m_per_batch * self.n
            mode = "on-demand" if doubles > AUTO_ON_DEMAND_DOUBLES else "materialized"
        self.mode = mode
        self._store: Dict[int, MeasurementBatch] = {}
        if self.mode == "materialized":
            for idx in sorted({self._resolve(lbl) for lbl in self.labels}):
                self._store[idx] = self._draw(idx)

    @property
    def q(self) -> int:
        return self._q_full if self._columns is None else int(self._columns.size)

    @property
    def columns(self) -> Optional[np.ndarray]:
        return self._columns

    def _resolve(self, label: str) -> int:
        if str(label) not in self.labels:
            raise ProblemError(f"Lote desconocido: {label}")
        return label_index(label) if self.sample_split else 0

    def _draw(self, idx: int) -> MeasurementBatch:
        q, m, n = self._q_full, self.m_per_batch, self.n
        a = gaussian_matrix(q * m, n, self.stream.substream(idx)).reshape(q, m, n)
        y = np.einsum("kmi,ik->km", a, self._x_star)
        return MeasurementBatch(label=self.labels[idx] if self.sample_split else "*", a=a, y=y)

    def batch_key(self, label: str) -> int:
        """Identity of the underlying draw; equal keys mean the same samples."""
        return self._resolve(label)

    def batch(self, label: str) -> MeasurementBatch:
        idx = self._resolve(label)
        full = self._store.get(idx)
        if full is None:
            full = self._draw(idx)
        if self._columns is None:
            return MeasurementBatch(label=str(label), a=full.a, y=full.y)
        return MeasurementBatch(label=str(label), a=full.a[self._columns], y=full.y[self._columns])

    def restrict(self, columns: Sequence[int]) -> "MeasurementSet":
        cols = np.asarray(list(columns), dtype=np.int64)
        if self._columns is not None:
            cols = self._columns[cols]
        view = MeasurementSet.__new__(MeasurementSet)
        view.__dict__.update(self.__dict__)
        view._columns = cols
        return view


def generate_measurements(
    gt: GroundTruth,
    m: int,
    T: int,
    stream: RngStream,
    sample_split: bool = True,
    mode: str = "auto",
) -> MeasurementSet:
    return MeasurementSet(gt.x_star, m, T, stream, sample_split=sample_split, mode=mode)
