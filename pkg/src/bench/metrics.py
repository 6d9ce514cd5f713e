"""
Forgetting Metrics Module
=========================

Summary numbers of an evaluation matrix: plasticity (mean diagonal error),
stability (mean last-row error), their relative increase and the forgetting
ratio with its curve over growing prefixes.
"""

from typing import Any, Dict, List, Optional

import numpy as np

from .scenario import EvalMatrix


class ZeroDiagonalError(ValueError):
    """The forgetting ratio divides by a diagonal entry that is zero."""


def _require_rows(matrix: EvalMatrix) -> None:
    if matrix.size == 0:
        raise ValueError("Metrics need at least one completed scenario")


def plasticity(matrix: EvalMatrix) -> float:
    _require_rows(matrix)
    return float(np.mean(matrix.diagonal()))


def stability(matrix: EvalMatrix) -> float:
    _require_rows(matrix)
    return float(np.mean(matrix.last_row()))


def increase_rate(matrix: EvalMatrix) -> float:
    """Percentage by which stability loss exceeds plasticity loss."""
    p = plasticity(matrix)
    if p == 0:
        raise ZeroDiagonalError("Plasticity is zero; increase rate undefined")
    return 100.0 * (stability(matrix) - p) / p


def forgetting_ratio(matrix: EvalMatrix, k: Optional[int] = None) -> float:
    """
    Mean relative error increase of each task between when it was learned and
    after scenario ``k``, with improvements clamped to zero.

    Raises:
        ZeroDiagonalError: when a diagonal entry used is zero.
    """
    k = matrix.size if k is None else k
    if not 2 <= k <= matrix.size:
        raise ValueError(f"Forgetting ratio needs 2 <= K <= {matrix.size}, got {k}")
    learned = matrix.diagonal()[:k]
    if np.any(learned == 0):
        raise ZeroDiagonalError("A diagonal test error is zero")
    final = np.array(matrix.rows[k - 1])
    return float(np.mean(np.maximum(0.0, final - learned) / learned))


def forgetting_curve(matrix: EvalMatrix) -> Dict[int, float]:
    """F_r for every prefix K = 2..size."""
    return {k: forgetting_ratio(matrix, k) for k in range(2, matrix.size + 1)}


def per_task_errors(matrix: EvalMatrix) -> List[Dict[str, Any]]:
    diag = matrix.diagonal()
    last = matrix.last_row()
    return [
        {'task_id': task_id, 'learned': float(diag[i]), 'final': float(last[i])}
        for i, task_id in enumerate(matrix.task_ids[:matrix.size])
    ]


def metrics_summary(matrix: EvalMatrix) -> Dict[str, Any]:
    """All metrics of one matrix, in the layout of ``metrics.json``."""
    curve = forgetting_curve(matrix) if matrix.size >= 2 else {}
    return {
        'matrix': matrix.to_dict(),
        'plasticity': plasticity(matrix),
        'stability': stability(matrix),
        'increase_rate': increase_rate(matrix),
        'forgetting_ratio_by_K': {str(k): v for k, v in curve.items()},
        'per_task_errors': per_task_errors(matrix),
    }
