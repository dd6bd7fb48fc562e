# -*- coding: utf-8 -*-
"""Seeded random streams shared by every simulated node and trial.

A stream is a pure value: asking it for numbers twice returns the same numbers.
Callers that need independent draws derive substreams instead of advancing state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
ALGORITHM_TAG = "philox4x64+seedseq/box-muller"


def splitmix64(value: int) -> int:
    z = (int(value) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fold_seed(master_seed: int, index: int) -> int:
    """XOR-fold a trial (or cell) index into a master seed."""
    return (int(master_seed) ^ splitmix64(index)) & MASK64


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    algorithm_tag: str = ALGORITHM_TAG

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & MASK64)

    def substream(self, index: int) -> "RngStream":
        child = splitmix64(self.stream_id ^ splitmix64(int(index) & MASK64))
        return RngStream(self.seed, child, self.algorithm_tag)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(seq))

    def uniforms(self, count: int) -> np.ndarray:
        return self.generator().random(int(count))

    def standard_normals(self, count: int) -> np.ndarray:
        # Box-Muller; uniforms (u[2i], u[2i+1]) give outputs (z[2i], z[2i+1]).
        count = int(count)
        pairs = (count + 1) // 2
        u = self.generator().random(2 * pairs)
        u1 = 1.0 - u[0::2]
        u2 = u[1::2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = (2.0 * math.pi) * u2
        z = np.empty(2 * pairs, dtype=np.float64)
        z[0::2] = radius * np.cos(angle)
        z[1::2] = radius * np.sin(angle)
        return z[:count]


def gaussian_matrix(rows: int, cols: int, stream: RngStream) -> np.ndarray:
    """i.i.d. standard normal matrix, filled row-major from ``stream``."""
    rows = int(rows)
    cols = int(cols)
    return stream.standard_normals(rows * cols).reshape(rows, cols)
