# -*- coding: utf-8 -*-
"""Communication graph, consensus weights and the AvgCons primitive."""
from __future__ import annotations

import logging
import math
from collections import deque
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

import numpy as np

from domain.entities.models import WEIGHT_SCHEMES, Network
from domain.numerics.linalg import sym_eig
from domain.numerics.rng import RngStream
from infra.logging.event_logger import log_event

MAX_GRAPH_ATTEMPTS = 1000
GAMMA_TOL = 1e-12

Edge = Tuple[int, int]


class NetworkError(Exception):
    pass


class IsolatedNodeError(NetworkError):
    pass


class DisconnectedGraphError(NetworkError):
    pass


class NotAnalyzableError(NetworkError):
    pass


class NoContractionError(NetworkError):
    pass


class ShapeMismatchError(NetworkError):
    pass


def er_graph(L: int, p: float, stream: RngStream) -> FrozenSet[Edge]:
    """Erdos-Renyi draw: pair (i, j), i < j, in lexicographic order uses uniform number k."""
    L = int(L)
    p = float(p)
    if L < 1:
        raise NetworkError("Se requiere L >= 1")
    if not (0.0 <= p <= 1.0):
        raise NetworkError(f"Probabilidad de arista fuera de [0, 1]: {p}")
    pairs = [(i, j) for i in range(L) for j in range(i + 1, L)]
    if not pairs:
        return frozenset()
    u = stream.uniforms(len(pairs))
    return frozenset(pair for pair, draw in zip(pairs, u) if draw < p)


def _adjacency(edges: FrozenSet[Edge], L: int) -> Dict[int, Set[int]]:
    adj: Dict[int, Set[int]] = {g: set() for g in range(L)}
    for a, b in edges:
        if a == b or not (0 <= a < L and 0 <= b < L):
            raise NetworkError(f"Arista invalida: ({a}, {b})")
        adj[a].add(b)
        adj[b].add(a)
    return adj


def degrees_of(edges: FrozenSet[Edge], L: int) -> np.ndarray:
    adj = _adjacency(edges, L)
    return np.array([len(adj[g]) for g in range(L)], dtype=np.int64)


def is_connected(edges: FrozenSet[Edge], L: int) -> bool:
    if L <= 1:
        return True
    adj = _adjacency(edges, L)
    seen = {0}
    frontier = deque([0])
    while frontier:
        cur = frontier.popleft()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return len(seen) == L


def weight_matrix(edges: FrozenSet[Edge], L: int, scheme: str = "metropolis") -> np.ndarray:
    if scheme not in WEIGHT_SCHEMES:
        raise NetworkError(f"Esquema de pesos invalido: {scheme}")
    L = int(L)
    if L == 1:
        return np.ones((1, 1), dtype=np.float64)
    deg = degrees_of(edges, L)
    isolated = np.flatnonzero(deg == 0)
    if isolated.size:
        raise IsolatedNodeError(f"Nodo aislado: {int(isolated[0])}")

    w = np.zeros((L, L), dtype=np.float64)
    for a, b in sorted(edges):
        if scheme == "metropolis":
            val = 1.0 / (1.0 + max(deg[a], deg[b]))
            w[a, b] = val
            w[b, a] = val
        else:
            w[a, b] = 1.0 / deg[a]
            w[b, a] = 1.0 / deg[b]
    if scheme == "metropolis":
        w[np.diag_indices(L)] = 1.0 - w.sum(axis=1)
    return w


def gamma_of(w: np.ndarray) -> float:
    """Second largest eigenvalue modulus of W.

    Symmetric W is analysed directly. A row-stochastic W = D^-1 A (zero diagonal, equal
    weights per row) is analysed through the similar matrix D^-1/2 A D^-1/2.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ShapeMismatchError("W debe ser cuadrada")
    L = w.shape[0]
    if L == 1:
        return 0.0
    if np.allclose(w, w.T, rtol=0.0, atol=1e-12):
        eigenvalues = sym_eig(w)[0]
    else:
        adj = (w > 0.0).astype(np.float64)
        if np.any(np.diag(adj)):
            raise NotAnalyzableError("W no simetrica con diagonal no nula")
        deg = adj.sum(axis=1)
        if np.any(deg == 0) or not np.allclose(adj, adj.T):
            raise NotAnalyzableError("W no corresponde a un grafo no dirigido")
        if not np.allclose(w, adj / deg[:, None], rtol=0.0, atol=1e-12):
            raise NotAnalyzableError("W no simetrica y no de vecinos iguales")
        inv_sqrt = 1.0 / np.sqrt(deg)
        eigenvalues = sym_eig(inv_sqrt[:, None] * adj * inv_sqrt[None, :])[0]
    return float(max(abs(eigenvalues[1]), abs(eigenvalues[-1])))


def t_con_for(eps_con: float, gamma: float, L: int) -> int:
    """Smallest t with gamma^t <= eps_con / L."""
    eps_con = float(eps_con)
    gamma = float(gamma)
    if not eps_con > 0.0:
        raise NetworkError("eps_con debe ser > 0")
    if gamma >= 1.0 - GAMMA_TOL:
        raise NoContractionError(f"gamma={gamma:.6g} no contrae")
    if gamma <= 0.0 or int(L) <= 1:
        return 1
    t = math.log(float(L) / eps_con) / math.log(1.0 / gamma)
    return max(1, int(math.ceil(t - 1e-12)))


def avg_cons(inputs: Sequence[np.ndarray], w: np.ndarray, t_con: int) -> List[np.ndarray]:
    """t_con rounds of Z <- W Z, scaled by L so outputs approximate the plain sum."""
    w = np.asarray(w, dtype=np.float64)
    L = len(inputs)
    if w.shape != (L, L):
        raise ShapeMismatchError(f"W {w.shape} no coincide con {L} entradas")
    if int(t_con) < 0:
        raise NetworkError("t_con debe ser >= 0")
    shape = np.shape(inputs[0])
    for z in inputs:
        if np.shape(z) != shape:
            raise ShapeMismatchError("Entradas con formas distintas")
    z = np.stack([np.asarray(x, dtype=np.float64).reshape(-1) for x in inputs])
    for _ in range(int(t_con)):
        z = w @ z
    return [float(L) * z[g].reshape(shape) for g in range(L)]


def consensus_sum(
    inputs: Sequence[np.ndarray], network: Network, t_con: int, exact: bool = False
) -> List[np.ndarray]:
    """AvgCons, or the exact sum replicated at every node when ``exact`` is set."""
    if exact or network.L == 1:
        total = np.sum(np.stack([np.asarray(x, dtype=np.float64) for x in inputs]), axis=0)
        return [total.copy() for _ in range(len(inputs))]
    return avg_cons(inputs, network.W, t_con)


def network_from_edges(
    edges: FrozenSet[Edge], L: int, scheme: str = "metropolis", attempt: int = 0
) -> Network:
    edges = frozenset((min(a, b), max(a, b)) for a, b in edges)
    if not is_connected(edges, L):
        raise DisconnectedGraphError("El grafo no es conexo")
    w = weight_matrix(edges, L, scheme)
    gamma = gamma_of(w)
    if L > 1 and gamma >= 1.0 - GAMMA_TOL:
        raise NoContractionError(f"gamma={gamma:.6g} no contrae")
    return Network(
        L=int(L),
        edges=edges,
        degrees=degrees_of(edges, L),
        weight_scheme=scheme,
        W=w,
        gamma=gamma,
        attempt=int(attempt),
    )


def single_node_network(scheme: str = "metropolis") -> Network:
    return network_from_edges(frozenset(), 1, scheme)


def build_network(
    L: int,
    p: float,
    stream: RngStream,
    scheme: str = "metropolis",
    max_attempts: int = MAX_GRAPH_ATTEMPTS,
) -> Network:
    """Draw ER(L, p) graphs from successive substreams until one is connected.

    Only disconnection triggers a redraw; a connected graph whose W does not contract
    raises NoContractionError.
    """
    if int(L) == 1:
        return single_node_network(scheme)
    for attempt in range(int(max_attempts)):
        edges = er_graph(L, p, stream.substream(attempt))
        if not is_connected(edges, L):
            continue
        net = network_from_edges(edges, L, scheme, attempt=attempt)
        log_event(
            "network_built",
            f"L={L} p={p} esquema={scheme} intento={attempt} aristas={len(edges)} gamma={net.gamma:.6g}",
            level=logging.INFO,
        )
        return net
    raise DisconnectedGraphError(f"Sin grafo conexo tras {max_attempts} intentos (L={L}, p={p})")


def messages_per_consensus(network: Network, t_con: int) -> int:
    """Scalar-matrix messages exchanged by one AvgCons call (one per directed edge and round)."""
    return int(t_con) * int(np.sum(network.degrees))
