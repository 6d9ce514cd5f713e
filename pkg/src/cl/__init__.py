"""
Continual Learning Package
==========================

Baseline, LWF, EWC, CLeaR and DER strategies for the RTT estimator, written as
composable loss terms plus per-task lifecycle hooks.
"""

from .hyperparams import Hyperparams
from .reservoir import ReservoirBuffer
from .fisher import fisher_diagonal
from .losses import (
    Anchor,
    Replay,
    baseline_loss,
    baseline_terms,
    der_loss,
    der_terms,
    ewc_loss,
    ewc_terms,
    lwf_loss,
    lwf_terms,
    quadratic_penalty,
)
from .strategies import (
    STRATEGIES,
    BaselineStrategy,
    ClearState,
    ClearStrategy,
    DerStrategy,
    EwcStrategy,
    LwfStrategy,
    create_strategy,
)

__all__ = [
    'Hyperparams', 'ReservoirBuffer', 'fisher_diagonal',
    'Anchor', 'Replay', 'baseline_loss', 'baseline_terms', 'der_loss', 'der_terms',
    'ewc_loss', 'ewc_terms', 'lwf_loss', 'lwf_terms', 'quadratic_penalty',
    'STRATEGIES', 'BaselineStrategy', 'ClearState', 'ClearStrategy', 'DerStrategy',
    'EwcStrategy', 'LwfStrategy', 'create_strategy',
]
