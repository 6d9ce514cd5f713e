"""
Transport Module
================

Channels the SW-ARQ state machines talk through. ``PhysicalTransport`` drives
the particle simulation; ``ScriptedTransport`` delivers bursts at scripted
delays, which makes protocol timing testable without physics.
"""

from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence

from ..simcore import (
    Endpoint,
    MoleculeKind,
    SimSettings,
    World,
    init_world,
    release_burst,
    step_world,
)
from ..utils.seeding import make_rng

# single-message runs always carry message 0
MESSAGE_ID = 0


@dataclass(frozen=True)
class ChannelEvent:
    """One molecule reaching the body it is addressed to."""

    kind: MoleculeKind
    msg_id: int
    time: float


class Transport(Protocol):
    def release(self, kind: MoleculeKind, msg_id: int, burst: int, time: float) -> None:
        ...

    def advance(self, time: float) -> List[ChannelEvent]:
        ...


class PhysicalTransport:
    """Particle-based channel built on ``simcore``."""

    def __init__(self, settings: SimSettings):
        self.settings = settings
        self.world: World = init_world(settings)
        self.rng = make_rng(settings.seed, 'motion')

    def release(self, kind: MoleculeKind, msg_id: int, burst: int, time: float) -> None:
        release_burst(self.world, kind, msg_id, burst, self.rng)

    def advance(self, time: float) -> List[ChannelEvent]:
        arrivals = step_world(self.world, self.rng)
        now = self.world.time
        return [
            ChannelEvent(
                kind=MoleculeKind.INFO if endpoint == Endpoint.RX else MoleculeKind.ACK,
                msg_id=MESSAGE_ID,
                time=now,
            )
            for _, endpoint in arrivals
        ]

    @property
    def emitted_info(self) -> int:
        return self.world.emitted[MoleculeKind.INFO]


class ScriptedTransport:
    """
    Deterministic mock channel.

    ``info_delays[b]`` is the delay after which the b-th information burst
    produces an arrival at the Rx (``None`` or missing: the burst is lost);
    ``ack_delays`` does the same for ACK bursts.
    """

    def __init__(self, info_delays: Sequence[Optional[float]] = (),
                 ack_delays: Sequence[Optional[float]] = ()):
        self.info_delays = list(info_delays)
        self.ack_delays = list(ack_delays)
        self.releases: List[tuple] = []
        self._scheduled: List[ChannelEvent] = []
        self._bursts = {MoleculeKind.INFO: 0, MoleculeKind.ACK: 0}

    def release(self, kind: MoleculeKind, msg_id: int, burst: int, time: float) -> None:
        self.releases.append((kind, burst, time))
        delays = self.info_delays if kind == MoleculeKind.INFO else self.ack_delays
        index = self._bursts[kind]
        self._bursts[kind] += 1
        delay = delays[index] if index < len(delays) else None
        if delay is not None:
            self._scheduled.append(ChannelEvent(kind=kind, msg_id=msg_id, time=time + delay))

    def advance(self, time: float) -> List[ChannelEvent]:
        due = [e for e in self._scheduled if e.time <= time + 1e-9]
        self._scheduled = [e for e in self._scheduled if e.time > time + 1e-9]
        return sorted(due, key=lambda e: e.time)
