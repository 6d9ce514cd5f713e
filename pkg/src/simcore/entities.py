"""
Simulation Entities Module
==========================

Molecules and the microtubule that carries them in directional transport.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class MoleculeKind(str, Enum):
    INFO = 'info'
    ACK = 'ack'
    NOISE = 'noise'


class MotionState(str, Enum):
    DIFFUSING = 'diffusing'
    ON_MICROTUBULE = 'on_microtubule'
    STATIONARY = 'stationary'


class Endpoint(str, Enum):
    TX = 'tx'
    RX = 'rx'


@dataclass
class Molecule:
    """A mobile information or ACK molecule (noise lives in the world arrays)."""

    id: int
    kind: MoleculeKind
    position: np.ndarray
    radius: float
    msg_id: int = 0
    copy_id: int = 0
    motion: MotionState = MotionState.DIFFUSING
    remaining_distance: float = 0.0
    direction: int = 0

    @property
    def target(self) -> Endpoint:
        """The body this molecule is allowed to touch (and be captured by)."""
        return Endpoint.RX if self.kind == MoleculeKind.INFO else Endpoint.TX

    def detach(self) -> None:
        self.motion = MotionState.DIFFUSING
        self.remaining_distance = 0.0
        self.direction = 0


@dataclass(frozen=True)
class Microtubule:
    """Straight track from the Tx surface to the Rx surface along the Tx->Rx axis."""

    endpoint_tx: np.ndarray
    endpoint_rx: np.ndarray
    capture_radius: float = 0.1

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.endpoint_rx - self.endpoint_tx))

    @property
    def axis(self) -> np.ndarray:
        return (self.endpoint_rx - self.endpoint_tx) / self.length

    def project(self, point: np.ndarray) -> float:
        """Arc-length coordinate of the segment point nearest to ``point``."""
        s = float(np.dot(point - self.endpoint_tx, self.axis))
        return min(max(s, 0.0), self.length)

    def point_at(self, s: float) -> np.ndarray:
        return self.endpoint_tx + self.axis * s

    def distance_to(self, point: np.ndarray) -> float:
        return float(np.linalg.norm(point - self.point_at(self.project(point))))
