"""Reproducible random streams.

Every random draw in the package comes from a Philox (counter-based)
generator keyed by ``(seed, *keys)``.  Replica ``r`` of experiment ``s``
is therefore ``stream(seed, s, r)`` regardless of how many workers ran or
in what order the replicas were scheduled.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str) -> int:
    """Stable 32-bit integer for a string stream name."""
    return zlib.crc32(name.encode("utf-8"))


def _as_int(k) -> int:
    if isinstance(k, str):
        return stream_key(k)
    k = int(k)
    if k < 0:
        raise ValueError("stream keys must be non-negative")
    return k


def stream(seed, *keys) -> np.random.Generator:
    """Philox generator for the stream addressed by ``(seed, *keys)``."""
    if isinstance(seed, np.random.Generator):
        if keys:
            raise ValueError("cannot derive keyed streams from a Generator")
        return seed
    entropy = [_as_int(seed)] + [_as_int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
