"""Seeded, counter-based random streams.

Every stream is a Philox generator keyed by a master seed plus a tuple of
integer coordinates (entry index, trial number, ...). A given coordinate
always sees the same numbers regardless of the order in which streams are
created, so serial and parallel schedules agree.
"""

from __future__ import annotations

import zlib

import numpy as np

_TAGS: dict[str, int] = {}


def tag(name: str) -> int:
    """Stable integer for a stream label."""
    if name not in _TAGS:
        _TAGS[name] = zlib.crc32(name.encode("ascii"))
    return _TAGS[name]


def _key(part) -> int:
    if isinstance(part, str):
        return tag(part)
    k = int(part)
    if k < 0:
        raise ValueError("stream coordinates must be non-negative")
    return k


def stream(seed: int, *coords) -> np.random.Generator:
    """Independent generator for ``(seed, *coords)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(c) for c in coords))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *coords) -> int:
    """A 63-bit integer seed derived from ``(seed, *coords)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(c) for c in coords))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
