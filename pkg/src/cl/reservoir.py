"""
Reservoir Module
================

Fixed-capacity uniform sample of a stream (Algorithm R): after ``seen``
insertions every element offered so far is stored with probability
``capacity / seen``.
"""

from typing import Any, Dict, List, Tuple

import numpy as np

Entry = Tuple[np.ndarray, float, float]


class ReservoirBuffer:
    """Stores (x, y, z) triples: input, true target and raw output at storage time."""

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be nonnegative")
        self.capacity = int(capacity)
        self.entries: List[Entry] = []
        self.seen = 0

    def add(self, x: np.ndarray, y: float, z: float, rng: np.random.Generator) -> None:
        self.seen += 1
        if self.capacity == 0:
            return
        entry = (np.array(x, dtype=float), float(y), float(z))
        if len(self.entries) < self.capacity:
            self.entries.append(entry)
            return
        slot = int(rng.integers(0, self.seen))
        if slot < self.capacity:
            self.entries[slot] = entry

    def sample(self, size: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Random subset without replacement as (X, y, z) arrays."""
        size = min(size, len(self.entries))
        picks = rng.choice(len(self.entries), size=size, replace=False)
        chosen = [self.entries[i] for i in sorted(picks)]
        return (np.array([e[0] for e in chosen]), np.array([e[1] for e in chosen]),
                np.array([e[2] for e in chosen]))

    def __len__(self) -> int:
        return len(self.entries)

    def state_dict(self) -> Dict[str, Any]:
        return {
            'capacity': self.capacity,
            'seen': self.seen,
            'entries': [{'x': e[0].tolist(), 'y': e[1], 'z': e[2]} for e in self.entries],
        }

    @classmethod
    def from_state(cls, state: Dict[str, Any]) -> 'ReservoirBuffer':
        buffer = cls(state['capacity'])
        buffer.seen = int(state['seen'])
        buffer.entries = [(np.array(e['x'], dtype=float), float(e['y']), float(e['z']))
                          for e in state['entries']]
        return buffer
