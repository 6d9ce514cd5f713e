"""
World Module
============

The bounded 3D environment: Tx and Rx spheres, an optional microtubule,
stationary noise molecules and the mobile information/ACK molecules, all
indexed in a ``SpatialGrid``.
"""

import json
from collections import deque
from typing import Any, Deque, Dict, List, Optional, Tuple

import numpy as np

from .entities import Endpoint, Microtubule, Molecule, MoleculeKind, MotionState
from .grid import SpatialGrid
from .settings import SimSettings
from ..utils.seeding import make_rng

# separation kept between touching spheres when placing them
CONTACT_EPS = 1e-9

_PLACEMENT_BATCH = 4096


class PlacementFailure(RuntimeError):
    """Noise molecules could not be placed within the retry budget."""


class World:
    """
    Mutable simulation state for one run.

    Positions live in one preallocated array indexed by molecule id so overlap
    checks are vectorized; ``molecules`` holds the mobile molecules only.
    """

    def __init__(self, settings: SimSettings):
        self.settings = settings
        s = settings
        half = s.env_side / 2.0
        extent = s.tx_rx_distance + s.tx_radius + s.rx_radius
        tx_x = (s.env_side - extent) / 2.0 + s.tx_radius
        self.tx_center = np.array([tx_x, half, half])
        self.rx_center = np.array([tx_x + s.tx_rx_distance, half, half])
        self.microtubule: Optional[Microtubule] = None
        if s.uses_microtubule:
            axis = (self.rx_center - self.tx_center) / s.tx_rx_distance
            self.microtubule = Microtubule(
                endpoint_tx=self.tx_center + axis * s.tx_radius,
                endpoint_rx=self.rx_center - axis * s.rx_radius,
                capture_radius=s.capture_radius,
            )

        max_diameter = max(s.mol_diameter, s.noise_diameter)
        self.grid = SpatialGrid(cell_size=2.0 * max_diameter)
        capacity = s.noise_count + 2 * (1 + s.max_retx) * s.duplicates + 16
        self._pos = np.zeros((capacity, 3))
        self._radius = np.zeros(capacity)
        self._next_id = 0

        self.noise_count = 0
        self.molecules: Dict[int, Molecule] = {}
        self.pending: Dict[Endpoint, Deque[Tuple[MoleculeKind, int, int]]] = {
            Endpoint.TX: deque(), Endpoint.RX: deque(),
        }
        self.emitted: Dict[MoleculeKind, int] = {MoleculeKind.INFO: 0, MoleculeKind.ACK: 0}
        self.step_index = 0

    # ------------------------------------------------------------------
    # geometry
    # ------------------------------------------------------------------

    @property
    def time(self) -> float:
        return self.step_index * self.settings.dt

    def body(self, endpoint: Endpoint) -> Tuple[np.ndarray, float]:
        if endpoint == Endpoint.TX:
            return self.tx_center, self.settings.tx_radius
        return self.rx_center, self.settings.rx_radius

    def inside(self, position: np.ndarray, radius: float) -> bool:
        side = self.settings.env_side
        return bool(np.all(position - radius > 0.0) and np.all(position + radius < side))

    def overlaps_body(self, position: np.ndarray, radius: float,
                      target: Optional[Endpoint] = None) -> bool:
        for endpoint in (Endpoint.TX, Endpoint.RX):
            if endpoint == target:
                continue
            center, body_radius = self.body(endpoint)
            if np.linalg.norm(position - center) < body_radius + radius:
                return True
        return False

    def overlapping_ids(self, position: np.ndarray, radius: float,
                        ignore_id: Optional[int] = None) -> List[int]:
        ids = self.grid.neighbors(position)
        if not ids:
            return []
        idx = np.fromiter(ids, dtype=np.int64, count=len(ids))
        dist = np.linalg.norm(self._pos[idx] - position, axis=1)
        hits = idx[dist < self._radius[idx] + radius]
        return [int(i) for i in hits if i != ignore_id]

    def is_free(self, position: np.ndarray, radius: float,
                ignore_id: Optional[int] = None, target: Optional[Endpoint] = None) -> bool:
        """True when a sphere at ``position`` is inside the box and touches nothing it may not touch."""
        if not self.inside(position, radius):
            return False
        if self.overlaps_body(position, radius, target):
            return False
        return not self.overlapping_ids(position, radius, ignore_id)

    # ------------------------------------------------------------------
    # molecule bookkeeping
    # ------------------------------------------------------------------

    def _allocate(self, position: np.ndarray, radius: float) -> int:
        mol_id = self._next_id
        if mol_id >= len(self._pos):
            grow = max(16, len(self._pos) // 2)
            self._pos = np.vstack([self._pos, np.zeros((grow, 3))])
            self._radius = np.concatenate([self._radius, np.zeros(grow)])
        self._next_id += 1
        self._pos[mol_id] = position
        self._radius[mol_id] = radius
        self.grid.insert(mol_id, position)
        return mol_id

    def add_noise(self, position: np.ndarray) -> int:
        mol_id = self._allocate(position, self.settings.noise_radius)
        self.noise_count += 1
        return mol_id

    def add_molecule(self, kind: MoleculeKind, position: np.ndarray, msg_id: int = 0,
                     copy_id: int = 0) -> Molecule:
        radius = self.settings.mol_radius
        mol_id = self._allocate(position, radius)
        mol = Molecule(id=mol_id, kind=kind, position=np.array(position, dtype=float),
                       radius=radius, msg_id=msg_id, copy_id=copy_id)
        self.molecules[mol_id] = mol
        return mol

    def move(self, mol: Molecule, position: np.ndarray) -> None:
        mol.position = np.array(position, dtype=float)
        self._pos[mol.id] = mol.position
        self.grid.move(mol.id, mol.position)

    def remove(self, mol_id: int) -> Molecule:
        mol = self.molecules.pop(mol_id)
        self.grid.remove(mol_id)
        return mol

    def noise_positions(self) -> np.ndarray:
        # noise is always placed first, so it owns ids 0..noise_count-1
        return self._pos[:self.noise_count].copy()

    def all_positions(self) -> Tuple[np.ndarray, np.ndarray]:
        """Positions and radii of every molecule currently in the world."""
        ids = list(range(self.noise_count)) + sorted(self.molecules)
        return self._pos[ids].copy(), self._radius[ids].copy()

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def snapshot(self) -> Dict[str, Any]:
        """Debug snapshot; schema documented in docs/FILE_FORMATS.md."""
        s = self.settings
        mt = None
        if self.microtubule is not None:
            mt = {
                'endpoint_tx': self.microtubule.endpoint_tx.tolist(),
                'endpoint_rx': self.microtubule.endpoint_rx.tolist(),
                'capture_radius': self.microtubule.capture_radius,
            }
        return {
            'step_index': self.step_index,
            'time': self.time,
            'env_side': s.env_side,
            'tx': {'center': self.tx_center.tolist(), 'radius': s.tx_radius},
            'rx': {'center': self.rx_center.tolist(), 'radius': s.rx_radius},
            'microtubule': mt,
            'noise': self._pos[:self.noise_count].tolist(),
            'molecules': [
                {
                    'id': m.id,
                    'kind': m.kind.value,
                    'msg_id': m.msg_id,
                    'copy_id': m.copy_id,
                    'position': m.position.tolist(),
                    'radius': m.radius,
                    'state': m.motion.value,
                    'remaining_distance': m.remaining_distance,
                    'direction': m.direction,
                }
                for m in (self.molecules[i] for i in sorted(self.molecules))
            ],
        }

    def to_json(self, indent: Optional[int] = None) -> str:
        return json.dumps(self.snapshot(), indent=indent, sort_keys=True)


def _noise_blocked(world: World, position: np.ndarray, radius: float) -> bool:
    if world.overlaps_body(position, radius):
        return True
    mt = world.microtubule
    if mt is not None and mt.distance_to(position) < mt.capture_radius + radius:
        return True
    return bool(world.overlapping_ids(position, radius))


def init_world(settings: SimSettings) -> World:
    """
    Build the initial world for a run.

    Noise molecules are placed uniformly at random by rejection sampling so that
    none overlaps another, the Tx, the Rx or the microtubule. Deterministic
    given ``settings.seed``.

    Raises:
        PlacementFailure: when one molecule needs more than
            ``settings.placement_retries`` draws.
    """
    world = World(settings)
    if settings.noise_count == 0:
        return world

    rng = make_rng(settings.seed, 'world')
    r = settings.noise_radius
    low, high = r + CONTACT_EPS, settings.env_side - r - CONTACT_EPS
    if high <= low:
        raise PlacementFailure("Noise molecules do not fit in the environment")

    candidates = np.empty((0, 3))
    cursor = 0
    for placed in range(settings.noise_count):
        for attempt in range(settings.placement_retries):
            if cursor == len(candidates):
                candidates = rng.uniform(low, high, size=(_PLACEMENT_BATCH, 3))
                cursor = 0
            position = candidates[cursor]
            cursor += 1
            if not _noise_blocked(world, position, r):
                world.add_noise(position)
                break
        else:
            raise PlacementFailure(
                f"Could not place noise molecule {placed + 1}/{settings.noise_count} "
                f"after {settings.placement_retries} draws (density too high)"
            )
    return world
