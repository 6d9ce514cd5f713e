"""
Ensemble Module
===============

Runs independent simulations of the same settings and reduces them to the
median RTT statistics used as training targets.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..simcore import SimSettings
from ..utils.console import console, progress
from .protocol import SimOutcome, run_simulation

# a median over delivered runs is only meaningful when most runs deliver
MIN_DELIVERY_RATE = 0.5

STATS_COLUMNS = ['median_rtt', 'delivery_rate', 'q1', 'q3']


class InvalidSample(RuntimeError):
    """Raised when fewer than half of an ensemble's runs deliver."""

    def __init__(self, message: str, stats: 'EnsembleStats'):
        super().__init__(message)
        self.stats = stats


@dataclass
class EnsembleStats:
    runs: int
    delivered: int
    delivery_rate: float
    median_rtt: Optional[float]
    q1: Optional[float]
    q3: Optional[float]
    valid: bool
    outcomes: List[SimOutcome] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'runs': self.runs,
            'delivered': self.delivered,
            'delivery_rate': self.delivery_rate,
            'median_rtt': self.median_rtt,
            'q1': self.q1,
            'q3': self.q3,
            'valid': self.valid,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def runs_frame(self) -> pd.DataFrame:
        """Per-run log, one row per simulation in run-index order."""
        return pd.DataFrame([
            {
                'run': i,
                'seed': o.seed,
                'delivered': o.delivered,
                'rtt': o.rtt,
                'censored_at': o.censored_at,
                'retransmissions': o.retransmissions,
                'info_arrival_time': o.info_arrival_time,
            }
            for i, o in enumerate(self.outcomes)
        ])

    def csv_row(self, settings: SimSettings) -> Dict[str, Any]:
        """Settings columns followed by the summary statistics."""
        row = settings.to_dict()
        row.update({name: getattr(self, name) for name in STATS_COLUMNS})
        return row


def summarize_outcomes(outcomes: Sequence[SimOutcome]) -> EnsembleStats:
    """Reduce run outcomes (in run-index order) to median/quartile statistics."""
    if not outcomes:
        raise ValueError("Cannot summarize an empty ensemble")
    rtts = np.array([o.rtt for o in outcomes if o.delivered], dtype=float)
    rate = len(rtts) / len(outcomes)
    if len(rtts):
        q1, median, q3 = (float(v) for v in np.percentile(rtts, [25, 50, 75]))
    else:
        q1 = median = q3 = None
    return EnsembleStats(
        runs=len(outcomes),
        delivered=len(rtts),
        delivery_rate=rate,
        median_rtt=median,
        q1=q1,
        q3=q3,
        valid=rate >= MIN_DELIVERY_RATE,
        outcomes=list(outcomes),
    )


def run_seeded(settings: SimSettings) -> SimOutcome:
    return run_simulation(settings)


def run_ensemble(settings: SimSettings, runs: int, parallelism: int = 1,
                 strict: bool = True) -> EnsembleStats:
    """
    Execute ``runs`` independent simulations, run i using seed ``settings.seed + i``.

    Raises:
        InvalidSample: when ``strict`` and the delivery rate is below 0.5.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    seeded = [settings.with_seed(settings.seed + i) for i in range(runs)]
    if parallelism > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(run_seeded, seeded))
    else:
        outcomes = [run_seeded(s) for s in progress(seeded, desc='🧪 runs')]

    stats = summarize_outcomes(outcomes)
    if not stats.valid:
        message = (f"Delivery rate {stats.delivery_rate:.2f} below {MIN_DELIVERY_RATE} "
                   f"for {settings.transport.value} d={settings.tx_rx_distance} "
                   f"noise={settings.noise_count}")
        if strict:
            raise InvalidSample(message, stats)
        console.warning(message)
    return stats
