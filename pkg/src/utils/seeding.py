"""
Seeding Module
==============

Every random stream in the project is derived from a single user seed plus a
stable list of component tags, e.g. ``derive_seed(seed, "dataset", "T3", 7)``.
"""

import zlib
from typing import Union

import numpy as np

Tag = Union[str, int]

_MASK64 = (1 << 64) - 1


def _tag_value(tag: Tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode('utf-8'))
    return int(tag) & _MASK64


def derive_seed(seed: int, *tags: Tag) -> int:
    """Derive a 64-bit child seed from ``seed`` and component tags."""
    entropy = [int(seed) & _MASK64] + [_tag_value(t) for t in tags]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32 | int(state[1])) & ((1 << 63) - 1)


def make_rng(seed: int, *tags: Tag) -> np.random.Generator:
    """Create a numpy Generator for a component, derived from ``seed``."""
    if not tags:
        return np.random.default_rng(int(seed) & _MASK64)
    return np.random.default_rng(derive_seed(seed, *tags))
