"""Seeded random streams.

A stream is identified by ``(seed, stream_id)``; equal pairs give equal draw
sequences, distinct stream ids give statistically independent generators.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | None = 0, stream: int | tuple[int, ...] = 0) -> np.random.Generator:
    key = stream if isinstance(stream, tuple) else (int(stream),)
    ss = np.random.SeedSequence(entropy=None if seed is None else int(seed), spawn_key=key)
    return np.random.default_rng(ss)


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)
