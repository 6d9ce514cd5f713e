"""
Training Module
===============

Supervised training of one task with mini-batch gradient descent, a seeded
train/validation split and early stopping on validation MSE.
"""

from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .backprop import mse_loss
from .model import Model, predict
from ..utils.seeding import make_rng


class EmptyDataset(ValueError):
    """Raised when a dataset has no samples."""


class TrainingDiverged(ArithmeticError):
    """Raised when the weights or the validation MSE stop being finite."""

    def __init__(self, epoch: int, detail: str):
        super().__init__(f"Training diverged at epoch {epoch}: {detail}")
        self.epoch = epoch


@dataclass
class Dataset:
    """Normalized inputs (N, 12) and normalized targets (N,)."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("Inputs and targets differ in length")

    def __len__(self) -> int:
        return int(self.y.shape[0])

    def subset(self, index: np.ndarray) -> 'Dataset':
        return Dataset(self.X[index], self.y[index])

    def split(self, fraction: float, rng: np.random.Generator) -> Tuple['Dataset', 'Dataset']:
        """
        Seeded (train, validation) split. With fewer than two samples the
        validation set is the training set itself.
        """
        n = len(self)
        if n < 2:
            return self, self
        n_val = min(max(1, int(round(n * fraction))), n - 1)
        order = rng.permutation(n)
        return self.subset(np.sort(order[n_val:])), self.subset(np.sort(order[:n_val]))


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 0.001
    patience: int = 10
    validation_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        for name in ('epochs', 'batch_size', 'patience'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in (0, 1)")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class TrainHistory:
    train_loss: List[float] = field(default_factory=list)
    val_mse: List[float] = field(default_factory=list)
    best_epoch: int = 0
    best_val_mse: float = float('inf')
    stopped_early: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def evaluate_mse(model: Model, dataset: Dataset) -> float:
    return mse_loss(predict(model, dataset.X), dataset.y)


def train_task(model: Model, dataset: Dataset, strategy: Optional[Any] = None,
               config: Optional[TrainConfig] = None) -> Tuple[Model, TrainHistory]:
    """
    Train ``model`` on one task's data under a continual-learning strategy.

    The input model is left untouched; the returned model is the snapshot with
    the best validation MSE.

    Raises:
        EmptyDataset: when ``dataset`` has no samples.
        TrainingDiverged: when an epoch leaves non-finite weights or a
            non-finite validation MSE, typically a learning rate or penalty
            weight too large for the data.
    """
    if strategy is None:
        # imported here to avoid a circular import (cl builds on nn)
        from ..cl import BaselineStrategy
        strategy = BaselineStrategy()
    config = config or TrainConfig()
    if len(dataset) == 0:
        raise EmptyDataset("Cannot train on an empty dataset")

    rng = make_rng(config.seed, 'train')
    train_set, val_set = dataset.split(config.validation_fraction, rng)

    working = model.copy()
    strategy.begin_task(working, train_set, val_set)

    history = TrainHistory()
    best = working.copy()
    since_best = 0
    for epoch in range(1, config.epochs + 1):
        with np.errstate(over='ignore', invalid='ignore'):
            try:
                loss = strategy.train_epoch(working, train_set, config, rng, epoch)
            except OverflowError as exc:
                raise TrainingDiverged(epoch, str(exc)) from exc
            val = evaluate_mse(working, val_set)
        if not working.is_finite():
            raise TrainingDiverged(epoch, "non-finite weights")
        if not np.isfinite(val):
            raise TrainingDiverged(epoch, f"validation MSE is {val}")
        history.train_loss.append(float(loss))
        history.val_mse.append(val)
        if val < history.best_val_mse:
            history.best_val_mse = val
            history.best_epoch = epoch
            best = working.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                history.stopped_early = epoch < config.epochs
                break
    return best, history
