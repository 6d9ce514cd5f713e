"""
Model Module
============

The 12 -> 20 -> 1 ReLU regression network, stored as plain numpy arrays.

For this regression head the raw pre-output value and the prediction are the
same number; ``forward`` returns both so replay strategies can name them.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .features import N_FEATURES, Normalizer

HIDDEN_UNITS = 20
OUTPUT_UNITS = 1

PARAM_SHAPES: Dict[str, Tuple[int, ...]] = {
    'W1': (HIDDEN_UNITS, N_FEATURES),
    'b1': (HIDDEN_UNITS,),
    'W2': (OUTPUT_UNITS, HIDDEN_UNITS),
    'b2': (OUTPUT_UNITS,),
}
PARAM_ORDER = ['W1', 'b1', 'W2', 'b2']
PARAM_COUNT = sum(int(np.prod(s)) for s in PARAM_SHAPES.values())


@dataclass
class Model:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    norm: Optional[Normalizer] = None

    def __post_init__(self):
        for name in PARAM_ORDER:
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != PARAM_SHAPES[name]:
                raise ValueError(f"{name} has shape {value.shape}, expected {PARAM_SHAPES[name]}")
            setattr(self, name, value)

    @classmethod
    def initialize(cls, rng: np.random.Generator, norm: Optional[Normalizer] = None) -> 'Model':
        """He-style uniform fan-in initialization with zero biases."""
        limit1 = np.sqrt(6.0 / N_FEATURES)
        limit2 = np.sqrt(6.0 / HIDDEN_UNITS)
        return cls(
            W1=rng.uniform(-limit1, limit1, size=PARAM_SHAPES['W1']),
            b1=np.zeros(HIDDEN_UNITS),
            W2=rng.uniform(-limit2, limit2, size=PARAM_SHAPES['W2']),
            b2=np.zeros(OUTPUT_UNITS),
            norm=norm,
        )

    @classmethod
    def zeros(cls, norm: Optional[Normalizer] = None) -> 'Model':
        return cls(**{n: np.zeros(PARAM_SHAPES[n]) for n in PARAM_ORDER}, norm=norm)

    def params(self) -> Dict[str, np.ndarray]:
        return {n: getattr(self, n) for n in PARAM_ORDER}

    def flatten(self) -> np.ndarray:
        return np.concatenate([getattr(self, n).ravel() for n in PARAM_ORDER])

    def with_flat(self, flat: np.ndarray) -> 'Model':
        """New model whose parameters are taken from a flat vector."""
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (PARAM_COUNT,):
            raise ValueError(f"Flat parameter vector must have {PARAM_COUNT} entries")
        values, offset = {}, 0
        for name in PARAM_ORDER:
            size = int(np.prod(PARAM_SHAPES[name]))
            values[name] = flat[offset:offset + size].reshape(PARAM_SHAPES[name]).copy()
            offset += size
        return Model(**values, norm=self.norm)

    def copy(self) -> 'Model':
        return self.with_flat(self.flatten())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.flatten())))


def forward(model: Model, x: np.ndarray) -> Tuple[float, np.ndarray, float]:
    """Single normalized input -> (prediction, hidden activations, raw output)."""
    hidden = np.maximum(model.W1 @ np.asarray(x, dtype=float) + model.b1, 0.0)
    raw = float(model.W2[0] @ hidden + model.b2[0])
    return raw, hidden, raw


def forward_batch(model: Model, X: np.ndarray) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
    """Batch forward pass; the cache holds what backpropagation needs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z1 = X @ model.W1.T + model.b1
    hidden = np.maximum(z1, 0.0)
    raw = hidden @ model.W2[0] + model.b2[0]
    return raw, {'X': X, 'z1': z1, 'hidden': hidden}


def predict(model: Model, X: np.ndarray) -> np.ndarray:
    return forward_batch(model, X)[0]
