"""Deterministic chunked Monte Carlo.

Sample budgets are cut into fixed-size chunks, each seeded by a child of one
``SeedSequence``. Workers only decide *who* evaluates a chunk, so every result
is independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_CHUNK = 2000


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        # draw a fresh entropy word; keeps callers that hold a Generator working
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(as_seed_sequence(seed))


def chunk_sizes(n_samples: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    if n_samples <= 0:
        return []
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunk(args):
    fn, child, size = args
    return fn(np.random.default_rng(child), size)


def map_chunks(fn: Callable[[np.random.Generator, int], object], n_samples: int, seed,
               chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> list:
    """Evaluate ``fn(rng, size)`` on every chunk, returned in chunk order."""
    sizes = chunk_sizes(n_samples, chunk_size)
    children = as_seed_sequence(seed).spawn(len(sizes))
    jobs = list(zip([fn] * len(sizes), children, sizes))
    if workers <= 1 or len(jobs) <= 1:
        return [_run_chunk(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, jobs))


@dataclass
class MeanEstimate:
    """Running mean with standard error; merged associatively by summation."""

    n: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "MeanEstimate":
        v = np.asarray(values, dtype=float)
        return cls(len(v), float(v.sum()), float((v * v).sum()))

    def merge(self, other: "MeanEstimate") -> "MeanEstimate":
        return MeanEstimate(self.n + other.n, self.total + other.total,
                            self.total_sq + other.total_sq)

    @property
    def mean(self) -> float:
        return self.total / self.n if self.n else 0.0

    @property
    def standard_error(self) -> float:
        if self.n < 2:
            return 0.0
        var = (self.total_sq - self.total**2 / self.n) / (self.n - 1)
        return float(np.sqrt(max(var, 0.0) / self.n))
