"""
Simulation Core Package
=======================

Particle-based Monte-Carlo physics for molecular communication: a bounded 3D
environment, diffusive / directional / hybrid transports, stationary noise
molecules and non-repulsive collisions.
"""

from .settings import SimSettings, SettingsError, Transport, TravelMode
from .entities import Endpoint, Microtubule, Molecule, MoleculeKind, MotionState
from .grid import SpatialGrid
from .world import World, PlacementFailure, init_world
from .motion import (
    MAX_REDRAWS,
    detect_arrivals,
    diffusive_step,
    directional_step,
    place_pending,
    release_burst,
    rides_microtubule,
    sample_travel_distance,
    step_world,
    try_reattach,
)

__all__ = [
    'SimSettings', 'SettingsError', 'Transport', 'TravelMode',
    'Endpoint', 'Microtubule', 'Molecule', 'MoleculeKind', 'MotionState',
    'SpatialGrid', 'World', 'PlacementFailure', 'init_world',
    'MAX_REDRAWS', 'detect_arrivals', 'diffusive_step', 'directional_step',
    'place_pending', 'release_burst', 'rides_microtubule', 'sample_travel_distance',
    'step_world', 'try_reattach',
]
