"""Seed derivation.

Every random stream is a child of the single user seed: the stream for
``(seed, *keys)`` is ``SeedSequence([seed, *keys])``. Monte-Carlo work is cut
into fixed-size chunks keyed by chunk index, so the draws do not depend on how
many workers execute the chunks.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 16384


def rng_for(seed, *keys):
    """Generator for the stream ``(seed, *keys)``; ``seed`` may itself be a tuple of ints."""
    head = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.default_rng(np.random.SeedSequence([*map(int, head), *map(int, keys)]))


def chunk_sizes(trials, chunk=CHUNK):
    full, rest = divmod(int(trials), chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn, trials, workers=1, chunk=CHUNK):
    """Run ``fn(chunk_index, size)`` over the chunk plan, results in chunk order."""
    sizes = chunk_sizes(trials, chunk)
    if workers <= 1 or len(sizes) <= 1:
        return [fn(i, s) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))
