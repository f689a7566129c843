"""Seeded RNG construction shared by every stochastic operation.

The pinned generator is Philox (4x64, counter-based), keyed with two
unsigned 64-bit words (seed, stream). Identical (seed, stream) pairs
reproduce bit-identical draws on any platform running the same numpy
version. Nested work units (per-trial seeds, per-cell sampling in the
sweep) derive child streams by packing small indices into the second
key word, 16 bits per path component.
"""

from __future__ import annotations

import numpy as np

_PATH_BITS = 16


def rng_from(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator keyed by (seed, stream)."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    key = np.array([seed, int(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def pack_stream(*path: int) -> int:
    """Pack up to four small non-negative indices into one stream word."""
    if len(path) > 4:
        raise ValueError("stream path too deep (max 4 components)")
    out = 0
    for p in path:
        p = int(p)
        if not 0 <= p < (1 << _PATH_BITS):
            raise ValueError(f"stream component {p} out of range")
        out = (out << _PATH_BITS) | p
    return out


def derive_seed(seed: int, *path: int) -> int:
    """A fresh 63-bit child seed for operations that take their own seed."""
    return int(rng_from(seed, pack_stream(*path)).integers(0, 2**63))
