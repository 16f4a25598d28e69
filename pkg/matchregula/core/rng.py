"""
Counter-based random streams.

All randomness in matchregula flows from integer seeds through numpy's Philox
bit generator. Sub-streams are addressed by integer keys
(``SeedSequence(seed, spawn_key=keys)``), so a stream depends only on its
address and never on the order in which streams are created. Indexed draws
(one per permutation) put the index in the top counter word of a keyed
Philox, giving disjoint streams without per-draw seeding.
"""

from enum import IntEnum

import numpy as np

SEED_MASK = (1 << 63) - 1


class Stream(IntEnum):
    """Well-known sub-stream addresses within one trial seed."""

    SAMPLE = 0
    TIEBREAK = 1
    PERMUTATION = 2


def _sequence(seed: int, keys: tuple[int, ...]) -> np.random.SeedSequence:
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a 63-bit child seed addressed by ``keys``."""
    state = _sequence(seed, keys).generate_state(1, dtype=np.uint64)
    return int(state[0]) & SEED_MASK


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the sub-stream of ``seed`` addressed by ``keys``."""
    return np.random.Generator(np.random.Philox(_sequence(seed, keys)))


def stream_key(seed: int, *keys: int) -> np.ndarray:
    """128-bit Philox key for indexed draws under ``seed``/``keys``."""
    return _sequence(seed, keys).generate_state(2, dtype=np.uint64)


def draw_stream(key: np.ndarray, index: int) -> np.random.Generator:
    """Generator for draw ``index`` of the indexed family ``key``."""
    counter = np.array([0, 0, 0, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
