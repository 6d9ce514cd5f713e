"""
Motion Module
=============

Per-step molecule dynamics: Brownian diffusion, motor-driven travel on the
microtubule, reattachment, releases from Tx/Rx and arrival detection.

Collisions are non-repulsive: a move that would overlap another molecule, a
body the molecule is not addressed to, or leave the box is rejected.
"""

import math
from typing import List, Tuple

import numpy as np

from .entities import Endpoint, Microtubule, Molecule, MoleculeKind, MotionState
from .settings import SimSettings, Transport, TravelMode
from .world import CONTACT_EPS, World

# redraws after a rejected diffusive proposal before the molecule stays put
MAX_REDRAWS = 10

# random surface points tried per pending molecule and step
SURFACE_RELEASE_TRIES = 10

Arrival = Tuple[int, Endpoint]


def sample_travel_distance(settings: SimSettings, rng: np.random.Generator) -> float:
    """Distance a motor carries its molecule before detaching."""
    if settings.motor_travel_mode == TravelMode.FIXED:
        return settings.motor_travel_mean
    return float(rng.exponential(settings.motor_travel_mean))


def rides_microtubule(settings: SimSettings, kind: MoleculeKind) -> bool:
    """Directional carries both kinds; hybrid carries information molecules only."""
    if settings.transport == Transport.DIRECTIONAL:
        return kind in (MoleculeKind.INFO, MoleculeKind.ACK)
    if settings.transport == Transport.HYBRID:
        return kind == MoleculeKind.INFO
    return False


def diffusive_step(mol: Molecule, world: World, rng: np.random.Generator) -> Molecule:
    """
    Move a diffusing molecule by a Gaussian displacement with per-axis
    variance 2*D*dt. Rejected proposals are redrawn up to MAX_REDRAWS times,
    after which the molecule stays where it is.
    """
    s = world.settings
    sigma = math.sqrt(2.0 * s.diffusion_coeff * s.dt)
    for _ in range(1 + MAX_REDRAWS):
        proposal = mol.position + rng.normal(0.0, sigma, size=3)
        if world.is_free(proposal, mol.radius, ignore_id=mol.id, target=mol.target):
            world.move(mol, proposal)
            break
    return mol


def directional_step(mol: Molecule, mt: Microtubule, world: World,
                     rng: np.random.Generator) -> Molecule:
    """
    Advance an attached molecule by motor_velocity*dt toward its destination.

    The molecule detaches when its travel budget runs out or when the next
    position collides with anything.
    """
    s = world.settings
    advance = min(s.motor_velocity * s.dt, mol.remaining_distance)
    coord = mt.project(mol.position) + mol.direction * advance
    proposal = mt.point_at(min(max(coord, 0.0), mt.length))
    if not world.is_free(proposal, mol.radius, ignore_id=mol.id, target=mol.target):
        mol.detach()
        return mol
    world.move(mol, proposal)
    mol.remaining_distance -= advance
    if mol.remaining_distance <= 1e-12:
        mol.detach()
    return mol


def try_reattach(mol: Molecule, mt: Microtubule, world: World,
                 rng: np.random.Generator) -> Molecule:
    """
    Attach a diffusing molecule that touches the microtubule, with a fresh travel budget.

    ``world`` is needed to check that the attachment point on the track is
    free, and ``rng`` draws the new travel distance. Molecules the transport
    does not carry on the track (ACKs under hybrid) are returned unchanged.
    """
    s = world.settings
    if mol.motion != MotionState.DIFFUSING or not rides_microtubule(s, mol.kind):
        return mol
    coord = mt.project(mol.position)
    anchor = mt.point_at(coord)
    if np.linalg.norm(mol.position - anchor) > mt.capture_radius + mol.radius:
        return mol
    if not world.is_free(anchor, mol.radius, ignore_id=mol.id, target=mol.target):
        return mol
    world.move(mol, anchor)
    mol.motion = MotionState.ON_MICROTUBULE
    mol.direction = 1 if mol.kind == MoleculeKind.INFO else -1
    mol.remaining_distance = sample_travel_distance(s, rng)
    return mol


def detect_arrivals(world: World) -> List[Arrival]:
    """
    Remove and report every molecule touching the body it is addressed to:
    information molecules at the Rx, ACK molecules at the Tx. Ordered by id.
    """
    arrivals: List[Arrival] = []
    for mol_id in sorted(world.molecules):
        mol = world.molecules[mol_id]
        center, body_radius = world.body(mol.target)
        if np.linalg.norm(mol.position - center) <= body_radius + mol.radius:
            arrivals.append((mol_id, mol.target))
    for mol_id, _ in arrivals:
        world.remove(mol_id)
    return arrivals


# ----------------------------------------------------------------------
# releases
# ----------------------------------------------------------------------

def _emitter(kind: MoleculeKind) -> Endpoint:
    return Endpoint.TX if kind == MoleculeKind.INFO else Endpoint.RX


def release_burst(world: World, kind: MoleculeKind, msg_id: int, burst: int,
                  rng: np.random.Generator) -> None:
    """Queue ``duplicates`` copies at the emitter and place as many as fit right away."""
    n = world.settings.duplicates
    queue = world.pending[_emitter(kind)]
    for copy in range(n):
        queue.append((kind, msg_id, burst * n + copy))
    world.emitted[kind] += n
    place_pending(world, rng)


def _loading_spot(world: World, kind: MoleculeKind) -> np.ndarray:
    mt = world.microtubule
    offset = world.settings.mol_radius + CONTACT_EPS
    if kind == MoleculeKind.INFO:
        return mt.point_at(offset)
    return mt.point_at(mt.length - offset)


def _surface_spot(world: World, kind: MoleculeKind, rng: np.random.Generator) -> np.ndarray:
    center, body_radius = world.body(_emitter(kind))
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return center + direction * (body_radius + world.settings.mol_radius + CONTACT_EPS)


def place_pending(world: World, rng: np.random.Generator) -> None:
    """
    Release queued copies. Diffusive copies go to random free points on the
    emitter surface; microtubule copies are loaded one at a time at the track
    end, each waiting until the previous one has moved out of the way.
    """
    s = world.settings
    for queue in world.pending.values():
        while queue:
            kind, msg_id, copy_id = queue[0]
            target = Endpoint.RX if kind == MoleculeKind.INFO else Endpoint.TX
            if rides_microtubule(s, kind):
                spot = _loading_spot(world, kind)
                if not world.is_free(spot, s.mol_radius, target=target):
                    break
                mol = world.add_molecule(kind, spot, msg_id, copy_id)
                mol.motion = MotionState.ON_MICROTUBULE
                mol.direction = 1 if kind == MoleculeKind.INFO else -1
                mol.remaining_distance = sample_travel_distance(s, rng)
            else:
                for _ in range(SURFACE_RELEASE_TRIES):
                    spot = _surface_spot(world, kind, rng)
                    if world.is_free(spot, s.mol_radius, target=target):
                        world.add_molecule(kind, spot, msg_id, copy_id)
                        break
                else:
                    break
            queue.popleft()


def step_world(world: World, rng: np.random.Generator) -> List[Arrival]:
    """Advance the whole world by one time step and return the arrivals."""
    place_pending(world, rng)
    mt = world.microtubule
    for mol_id in sorted(world.molecules):
        mol = world.molecules[mol_id]
        if mol.motion == MotionState.ON_MICROTUBULE:
            directional_step(mol, mt, world, rng)
        else:
            diffusive_step(mol, world, rng)
            if mt is not None:
                try_reattach(mol, mt, world, rng)
    world.step_index += 1
    return detect_arrivals(world)
