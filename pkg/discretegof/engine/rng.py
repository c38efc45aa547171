"""
Deterministic random streams.

Every stream is a Philox4x64-10 counter-based generator. The key comes from
(seed, domain tag) through numpy's SeedSequence; the stream index (simulation
number, trial number, chunk number) goes into the high word of the 256-bit
counter, so streams never overlap and can be created in any order on any
worker.
"""
from enum import IntEnum
from functools import lru_cache

import numpy as np

from ..config import MAX_SEED
from ..errors import InvalidArgument

RNG_ALGORITHM = "philox4x64-10"
RNG_ID = f"{RNG_ALGORITHM}/seedsequence-key/counter-index;numpy-{np.__version__}"


class StreamTag(IntEnum):
    """Independent seed domains."""
    SIMULATION = 1
    ORDERING = 2
    THEORY = 3
    DATA = 4


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise InvalidArgument(f"Seed must be an integer in 0..{MAX_SEED}, got {seed!r}")
    return int(seed)


@lru_cache(maxsize=256)
def _key(seed: int, tag: int) -> tuple:
    state = np.random.SeedSequence(entropy=seed, spawn_key=(tag,)).generate_state(2, dtype=np.uint64)
    return tuple(int(word) for word in state)


def stream(seed: int, tag: StreamTag, index: int) -> np.random.Generator:
    """Generator for stream `index` in domain `tag` under `seed`."""
    key = np.array(_key(check_seed(seed), int(tag)), dtype=np.uint64)
    counter = np.array([0, 0, index, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def simulation_stream(seed: int, index: int) -> np.random.Generator:
    return stream(seed, StreamTag.SIMULATION, index)
