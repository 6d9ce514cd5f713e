"""
Backpropagation Module
======================

Composite losses are lists of terms:

* ``OutputTerm``  - weight * MSE(model(inputs), targets)
* ``PenaltyTerm`` - weight * sum_i importance_i * (theta_i - anchor_i)^2

Every continual-learning strategy expresses its objective this way, so one
analytic backward pass serves all of them.
"""

from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from .model import Model, PARAM_ORDER, forward_batch


def mse_loss(pred: np.ndarray, truth: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"Length mismatch: {pred.shape[0]} predictions vs {truth.shape[0]} targets")
    if pred.size == 0:
        raise ValueError("MSE needs at least one value")
    return float(np.mean((pred - truth) ** 2))


@dataclass(frozen=True)
class OutputTerm:
    inputs: np.ndarray
    targets: np.ndarray
    weight: float = 1.0


@dataclass(frozen=True)
class PenaltyTerm:
    anchor: np.ndarray
    importance: np.ndarray
    weight: float = 1.0


LossTerm = Union[OutputTerm, PenaltyTerm]


@dataclass
class Gradients:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @classmethod
    def zeros_like(cls, model: Model) -> 'Gradients':
        return cls(**{n: np.zeros_like(getattr(model, n)) for n in PARAM_ORDER})

    def flatten(self) -> np.ndarray:
        return np.concatenate([getattr(self, n).ravel() for n in PARAM_ORDER])

    def add_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for name in PARAM_ORDER:
            target = getattr(self, name)
            target += flat[offset:offset + target.size].reshape(target.shape)
            offset += target.size


def loss_value(model: Model, terms: Sequence[LossTerm]) -> float:
    total = 0.0
    flat = None
    for term in terms:
        if term.weight == 0.0:
            continue
        if isinstance(term, OutputTerm):
            pred, _ = forward_batch(model, term.inputs)
            total += term.weight * mse_loss(pred, term.targets)
        else:
            if flat is None:
                flat = model.flatten()
            total += term.weight * float(np.sum(term.importance * (flat - term.anchor) ** 2))
    return total


def backward(model: Model, terms: Sequence[LossTerm]) -> Gradients:
    """Analytic gradient of the summed loss terms with respect to every parameter."""
    grads = Gradients.zeros_like(model)
    flat = None
    for term in terms:
        if term.weight == 0.0:
            continue
        if isinstance(term, PenaltyTerm):
            if flat is None:
                flat = model.flatten()
            grads.add_flat(2.0 * term.weight * term.importance * (flat - term.anchor))
            continue
        pred, cache = forward_batch(model, term.inputs)
        targets = np.asarray(term.targets, dtype=float).ravel()
        d_out = term.weight * 2.0 * (pred - targets) / pred.shape[0]
        hidden = cache['hidden']
        grads.W2[0] += d_out @ hidden
        grads.b2[0] += d_out.sum()
        d_z1 = np.outer(d_out, model.W2[0]) * (cache['z1'] > 0.0)
        grads.W1 += d_z1.T @ cache['X']
        grads.b1 += d_z1.sum(axis=0)
    return grads


def per_sample_gradients(model: Model, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Flat MSE gradient of every single sample, shape (N, PARAM_COUNT)."""
    pred, cache = forward_batch(model, X)
    d_out = 2.0 * (pred - np.asarray(y, dtype=float).ravel())
    hidden = cache['hidden']
    d_z1 = d_out[:, None] * model.W2[0][None, :] * (cache['z1'] > 0.0)
    g_W1 = d_z1[:, :, None] * cache['X'][:, None, :]
    return np.concatenate([
        g_W1.reshape(len(d_out), -1),
        d_z1,
        d_out[:, None] * hidden,
        d_out[:, None],
    ], axis=1)


def apply_gradients(model: Model, grads: Gradients, learning_rate: float) -> None:
    """In-place plain gradient-descent update."""
    for name in PARAM_ORDER:
        param = getattr(model, name)
        param -= learning_rate * getattr(grads, name)


TermList = List[LossTerm]
