"""
SW-ARQ Package
==============

Stop-and-wait ARQ transmitter/receiver state machines over the simulated
physics, single-run RTT measurement and ensemble statistics.
"""

from .transport import ChannelEvent, MESSAGE_ID, PhysicalTransport, ScriptedTransport, Transport
from .protocol import RxState, SimOutcome, TxPhase, TxState, run_simulation
from .ensemble import (
    EnsembleStats,
    InvalidSample,
    MIN_DELIVERY_RATE,
    STATS_COLUMNS,
    run_ensemble,
    summarize_outcomes,
)

__all__ = [
    'ChannelEvent', 'MESSAGE_ID', 'PhysicalTransport', 'ScriptedTransport', 'Transport',
    'RxState', 'SimOutcome', 'TxPhase', 'TxState', 'run_simulation',
    'EnsembleStats', 'InvalidSample', 'MIN_DELIVERY_RATE', 'STATS_COLUMNS',
    'run_ensemble', 'summarize_outcomes',
]
