"""Counter-based random streams and a block-parallel map.

Every Monte Carlo routine splits its work into fixed-size blocks.  Block
``b`` of a stream tagged ``tag`` draws from a Philox generator seeded by
``SeedSequence(seed, spawn_key=(tag, b))``, so the numbers produced never
depend on how blocks are distributed over workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

# stream tags, one per consumer
TAG_INCREMENTS = 1
TAG_SUP = 2
TAG_CELL_MAX = 3
TAG_COVERAGE = 4

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def block_generator(seed: int, tag: int, block: int, *extra: int) -> np.random.Generator:
    """Generator for one block of a tagged stream."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(tag), int(block), *map(int, extra)))
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(total: int, block: int) -> list[int]:
    """Split ``total`` items into blocks of ``block`` (last one shorter)."""
    if total < 0:
        raise ValueError("total must be nonnegative")
    full, rest = divmod(int(total), int(block))
    return [block] * full + ([rest] if rest else [])


def parallel_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Ordered map, optionally over a process pool.

    Results are returned in input order, so reductions over them are
    independent of the worker count.
    """
    workers = int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
