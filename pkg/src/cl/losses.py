"""
Strategy Losses Module
======================

Each continual-learning objective as a list of ``nn`` loss terms, plus the
scalar loss functions built on them.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from ..nn import Model, OutputTerm, PenaltyTerm, TermList, loss_value, predict

Anchor = Tuple[np.ndarray, np.ndarray]  # (theta_hat, importance)
Replay = Tuple[np.ndarray, np.ndarray]  # (inputs, targets)


def baseline_terms(X: np.ndarray, y: np.ndarray) -> TermList:
    return [OutputTerm(X, y, 1.0)]


def lwf_terms(X: np.ndarray, y: np.ndarray, snapshots: Sequence[Model], lam: float) -> TermList:
    """
    (1 - lam) * MSE on the current task plus lam times the mean distillation
    error against each frozen snapshot, all evaluated on the current inputs.
    """
    terms: TermList = [OutputTerm(X, y, 1.0 - lam)]
    if snapshots and lam != 0.0:
        share = lam / len(snapshots)
        terms.extend(OutputTerm(X, predict(old, X), share) for old in snapshots)
    return terms


def ewc_terms(X: np.ndarray, y: np.ndarray, anchors: Sequence[Anchor], lam: float) -> TermList:
    terms: TermList = [OutputTerm(X, y, 1.0)]
    terms.extend(PenaltyTerm(theta_hat, importance, lam / 2.0) for theta_hat, importance in anchors)
    return terms


def der_terms(X: np.ndarray, y: np.ndarray, logit_replay: Optional[Replay],
              label_replay: Optional[Replay], alpha: float, beta: float) -> TermList:
    """Current MSE + alpha * MSE to stored raw outputs + beta * MSE to stored labels."""
    terms: TermList = [OutputTerm(X, y, 1.0)]
    if logit_replay is not None and len(logit_replay[1]):
        terms.append(OutputTerm(logit_replay[0], logit_replay[1], alpha))
    if label_replay is not None and len(label_replay[1]):
        terms.append(OutputTerm(label_replay[0], label_replay[1], beta))
    return terms


def quadratic_penalty(theta: np.ndarray, anchors: Sequence[Anchor], lam: float) -> float:
    """(lam / 2) * sum_k sum_i F_i^k (theta_i - theta_hat_i^k)^2."""
    theta = np.asarray(theta, dtype=float)
    return lam / 2.0 * sum(float(np.sum(f * (theta - t) ** 2)) for t, f in anchors)


def baseline_loss(model: Model, X: np.ndarray, y: np.ndarray) -> float:
    return loss_value(model, baseline_terms(X, y))


def lwf_loss(model: Model, X: np.ndarray, y: np.ndarray, snapshots: Sequence[Model],
             lam: float) -> float:
    return loss_value(model, lwf_terms(X, y, snapshots, lam))


def ewc_loss(model: Model, X: np.ndarray, y: np.ndarray, anchors: Sequence[Anchor],
             lam: float) -> float:
    return loss_value(model, ewc_terms(X, y, anchors, lam))


def der_loss(model: Model, X: np.ndarray, y: np.ndarray, logit_replay: Optional[Replay],
             label_replay: Optional[Replay], alpha: float, beta: float) -> float:
    return loss_value(model, der_terms(X, y, logit_replay, label_replay, alpha, beta))
