"""Seeded, block-parallel Monte Carlo plumbing.

Replicas are split into fixed-size blocks.  Block ``b`` of stream ``key`` draws
from ``SeedSequence(seed, spawn_key=(*key, b))``, so results depend only on
``(seed, key, replicas)`` and never on how many threads ran the blocks.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 4096

_threads = 1


def set_threads(n: int) -> None:
    global _threads
    if n < 1:
        raise ValueError("threads must be >= 1")
    _threads = int(n)


def get_threads() -> int:
    return _threads


def block_rng(seed: int, key: tuple, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key) + (int(block),))
    return np.random.Generator(np.random.PCG64(ss))


def block_sizes(replicas: int, block_size: int = BLOCK_SIZE):
    full, rest = divmod(int(replicas), block_size)
    sizes = [block_size] * full
    if rest:
        sizes.append(rest)
    return sizes


def map_blocks(fn, replicas, seed, key=(), *, threads=None, block_size=BLOCK_SIZE):
    """Apply ``fn(rng, size)`` to every block and concatenate along axis 0."""
    sizes = block_sizes(replicas, block_size)
    threads = _threads if threads is None else threads

    def run(b):
        return fn(block_rng(seed, key, b), sizes[b])

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    if not parts:
        return np.empty(0)
    return np.concatenate(parts, axis=0)


def proportion_stderr(p_hat: float, replicas: int) -> float:
    return float(np.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / replicas))
