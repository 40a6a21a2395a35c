"""Seeded random streams.

Every Monte Carlo batch draws from its own stream keyed by (seed, stream id),
so totals do not depend on how batches are spread over workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BATCH = 1 << 16


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def batch_sizes(total: int, batch: int = BATCH) -> list:
    full, rest = divmod(int(total), batch)
    return [batch] * full + ([rest] if rest else [])


def map_batches(fn, sizes, workers: int = 1):
    """Apply ``fn(stream_id, size)`` to every batch, preserving batch order."""
    jobs = list(enumerate(sizes))
    if workers <= 1 or len(jobs) <= 1:
        return [fn(i, s) for i, s in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def uniform_ball(rng: np.random.Generator, size: int, dim: int, radius: float) -> np.ndarray:
    g = rng.standard_normal((size, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(size) ** (1.0 / dim)
    return g * r[:, None]
