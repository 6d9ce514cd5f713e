"""
Fisher Diagonal Module
======================

Per-parameter importance: the variance of per-sample MSE gradients over a
task's training data.
"""

import numpy as np

from ..nn import Dataset, Model, per_sample_gradients


def fisher_diagonal(model: Model, dataset: Dataset) -> np.ndarray:
    if len(dataset) == 0:
        raise ValueError("Fisher diagonal needs at least one sample")
    grads = per_sample_gradients(model, dataset.X, dataset.y)
    return np.var(grads, axis=0)
