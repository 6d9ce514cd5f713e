"""
SW-ARQ Protocol Module
======================

Transmitter and receiver state machines for a single message and the
simulation loop that measures its round-trip time.
"""

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Dict, List, Optional, Set

from ..simcore import MoleculeKind, SimSettings
from .transport import MESSAGE_ID, PhysicalTransport, Transport

# tolerance when comparing the step clock with timer deadlines
_CLOCK_EPS = 1e-9


class TxPhase(str, Enum):
    AWAITING_ACK = 'awaiting_ack'
    DONE = 'done'
    FAILED = 'failed'


@dataclass
class TxState:
    rto_deadline: float
    phase: TxPhase = TxPhase.AWAITING_ACK
    retx_used: int = 0
    rtt: Optional[float] = None


@dataclass
class RxState:
    acked_msgs: Set[int] = field(default_factory=set)
    ack_rto_deadline: Optional[float] = None
    ack_retx_used: int = 0


@dataclass
class SimOutcome:
    """Result of one run; failure is a value (``delivered=False``), not an error."""

    delivered: bool
    rtt: Optional[float]
    censored_at: Optional[float]
    retransmissions: int
    info_arrival_time: Optional[float] = None
    tx_release_times: List[float] = field(default_factory=list)
    rx_release_times: List[float] = field(default_factory=list)
    info_emitted: int = 0
    seed: int = 0

    @property
    def value(self) -> float:
        """RTT when delivered, otherwise the censoring time."""
        return self.rtt if self.delivered else self.censored_at

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def run_simulation(settings: SimSettings, transport: Optional[Transport] = None) -> SimOutcome:
    """
    Simulate one SW-ARQ message exchange.

    The Tx releases n information copies at t=0 and again every RTO without an
    ACK, at most ``max_retx`` times. The Rx answers the first information
    arrival with n ACK copies and re-releases them every RTO (also capped at
    ``max_retx``) since no further message ever arrives. The run ends at the
    first ACK reaching the Tx, or one RTO after the last retransmission.
    """
    channel = transport if transport is not None else PhysicalTransport(settings)
    n = settings.duplicates
    rto = settings.rto

    tx = TxState(rto_deadline=rto)
    rx = RxState()
    outcome = SimOutcome(delivered=False, rtt=None, censored_at=None, retransmissions=0,
                         seed=settings.seed)

    channel.release(MoleculeKind.INFO, MESSAGE_ID, 0, 0.0)
    outcome.tx_release_times.append(0.0)

    step = 0
    while tx.phase == TxPhase.AWAITING_ACK:
        step += 1
        now = step * settings.dt
        for event in sorted(channel.advance(now), key=lambda e: (e.time, e.kind != MoleculeKind.INFO)):
            if event.kind == MoleculeKind.INFO:
                if event.msg_id in rx.acked_msgs:
                    continue
                rx.acked_msgs.add(event.msg_id)
                outcome.info_arrival_time = event.time
                channel.release(MoleculeKind.ACK, event.msg_id, 0, event.time)
                outcome.rx_release_times.append(event.time)
                rx.ack_rto_deadline = event.time + rto
            elif tx.phase == TxPhase.AWAITING_ACK:
                tx.phase = TxPhase.DONE
                tx.rtt = event.time
                break
        if tx.phase == TxPhase.DONE:
            break

        while (rx.ack_rto_deadline is not None and now >= rx.ack_rto_deadline - _CLOCK_EPS):
            if rx.ack_retx_used >= settings.max_retx:
                rx.ack_rto_deadline = None
                break
            rx.ack_retx_used += 1
            channel.release(MoleculeKind.ACK, MESSAGE_ID, rx.ack_retx_used, rx.ack_rto_deadline)
            outcome.rx_release_times.append(rx.ack_rto_deadline)
            rx.ack_rto_deadline = outcome.info_arrival_time + (rx.ack_retx_used + 1) * rto

        if now >= tx.rto_deadline - _CLOCK_EPS:
            if tx.retx_used >= settings.max_retx:
                tx.phase = TxPhase.FAILED
                outcome.censored_at = tx.rto_deadline
                break
            tx.retx_used += 1
            channel.release(MoleculeKind.INFO, MESSAGE_ID, tx.retx_used, tx.rto_deadline)
            outcome.tx_release_times.append(tx.rto_deadline)
            tx.rto_deadline = (tx.retx_used + 1) * rto

    outcome.retransmissions = tx.retx_used
    outcome.info_emitted = len(outcome.tx_release_times) * n
    if tx.phase == TxPhase.DONE:
        outcome.delivered = True
        outcome.rtt = tx.rtt
    return outcome
