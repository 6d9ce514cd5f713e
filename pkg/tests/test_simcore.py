#!/usr/bin/env python3
"""
Simulation Core Tests
=====================

Settings validation, world construction, molecule motion and the physics
oracles: Brownian variance and deterministic directional travel.
"""

import json
import sys

import numpy as np
import pytest

from src.arq import run_simulation
from src.simcore import (
    MAX_REDRAWS,
    Endpoint,
    MoleculeKind,
    MotionState,
    PlacementFailure,
    SettingsError,
    SimSettings,
    SpatialGrid,
    Transport,
    TravelMode,
    detect_arrivals,
    diffusive_step,
    directional_step,
    init_world,
    release_burst,
    rides_microtubule,
    sample_travel_distance,
    step_world,
    try_reattach,
)
from src.utils.seeding import make_rng


def directional(**overrides) -> SimSettings:
    data = dict(rto=100.0, transport='directional', duplicates=1,
                motor_travel_mode='fixed', motor_travel_mean=10.0)
    data.update(overrides)
    return SimSettings(**data)


# ----------------------------------------------------------------------
# settings
# ----------------------------------------------------------------------

def test_settings_defaults_and_enums():
    settings = SimSettings(rto=50.0, transport='hybrid')
    assert settings.transport == Transport.HYBRID
    assert settings.motor_travel_mode == TravelMode.EXPONENTIAL
    assert settings.env_side == 150.0
    assert settings.duplicates == 10
    assert settings.max_retx == 5
    assert settings.contact_gap == pytest.approx(10.0 - 2.5 - 2.5 - 1.0)
    assert settings.uses_microtubule


def test_settings_reject_invalid_values():
    with pytest.raises(SettingsError):
        SimSettings(rto=10.0, tx_rx_distance=148.0)
    with pytest.raises(SettingsError):
        SimSettings(rto=10.0, diffusion_coeff=0.0)
    with pytest.raises(SettingsError):
        SimSettings(rto=10.0, duplicates=0)
    with pytest.raises(SettingsError):
        SimSettings(rto=10.0, noise_count=-1)
    with pytest.raises(SettingsError):
        SimSettings(rto=10.0, dt=0.0)


def test_settings_from_dict_rejects_unknown_fields():
    with pytest.raises(SettingsError):
        SimSettings.from_dict({'rto': 10.0, 'warp_drive': True})
    settings = SimSettings.from_dict(SimSettings(rto=12.0, noise_count=7).to_dict())
    assert settings == SimSettings(rto=12.0, noise_count=7)


# ----------------------------------------------------------------------
# world
# ----------------------------------------------------------------------

def test_init_world_without_noise():
    world = init_world(SimSettings(rto=10.0, tx_rx_distance=10.0))
    assert world.noise_count == 0
    assert world.molecules == {}
    assert world.microtubule is None
    assert np.linalg.norm(world.rx_center - world.tx_center) == pytest.approx(10.0)
    assert world.tx_center[1] == world.tx_center[2] == 75.0
    assert world.rx_center[1] == world.rx_center[2] == 75.0


def test_init_world_is_deterministic():
    settings = SimSettings(rto=10.0, noise_count=500, seed=42, transport='directional')
    first = init_world(settings).noise_positions()
    second = init_world(settings).noise_positions()
    assert np.array_equal(first, second)
    other = init_world(settings.with_seed(43)).noise_positions()
    assert not np.array_equal(first, other)


def test_noise_avoids_bodies_microtubule_and_each_other():
    settings = SimSettings(rto=10.0, env_side=40.0, tx_rx_distance=20.0, noise_count=800,
                           transport='directional', seed=3)
    world = init_world(settings)
    noise = world.noise_positions()
    r = settings.noise_radius
    assert len(noise) == 800
    assert np.all(noise - r > 0) and np.all(noise + r < settings.env_side)
    dist = np.linalg.norm(noise[:, None, :] - noise[None, :, :], axis=-1)
    np.fill_diagonal(dist, np.inf)
    assert dist.min() >= 2 * r
    for center, radius in (world.body(Endpoint.TX), world.body(Endpoint.RX)):
        assert np.min(np.linalg.norm(noise - center, axis=1)) >= radius + r
    mt = world.microtubule
    assert min(mt.distance_to(p) for p in noise) >= mt.capture_radius + r


def test_placement_failure_when_too_dense():
    settings = SimSettings(rto=10.0, env_side=12.0, tx_rx_distance=6.0, tx_diameter=2.0,
                           rx_diameter=2.0, noise_count=10000, placement_retries=10)
    with pytest.raises(PlacementFailure):
        init_world(settings)


@pytest.mark.slow
def test_init_world_with_max_noise():
    settings = SimSettings(rto=10.0, noise_count=100000, seed=1)
    world = init_world(settings)
    assert world.noise_count == 100000
    noise = world.noise_positions()
    for i in range(0, 100000, 100):
        assert world.overlapping_ids(noise[i], settings.noise_radius, ignore_id=i) == []


def test_snapshot_is_json_serializable():
    world = init_world(directional(noise_count=5))
    release_burst(world, MoleculeKind.INFO, 0, 0, make_rng(0, 'test'))
    snap = json.loads(world.to_json())
    assert snap['step_index'] == 0
    assert len(snap['noise']) == 5
    assert snap['molecules'][0]['kind'] == 'info'
    assert snap['molecules'][0]['state'] == 'on_microtubule'
    assert snap['microtubule'] is not None


def test_spatial_grid_indexing():
    grid = SpatialGrid(cell_size=2.0)
    grid.insert(1, np.array([0.5, 0.5, 0.5]))
    grid.insert(2, np.array([2.5, 0.5, 0.5]))
    grid.insert(3, np.array([9.0, 9.0, 9.0]))
    assert sorted(grid.neighbors(np.array([1.0, 1.0, 1.0]))) == [1, 2]
    grid.move(2, np.array([8.5, 9.0, 9.0]))
    assert grid.cell_of([8.5, 9.0, 9.0]) == (4, 4, 4)
    assert sorted(grid.neighbors(np.array([9.0, 9.0, 9.0]))) == [2, 3]
    grid.remove(3)
    assert 3 not in grid and len(grid) == 2
    with pytest.raises(ValueError):
        SpatialGrid(0.0)


# ----------------------------------------------------------------------
# motion
# ----------------------------------------------------------------------

def test_transport_assignment():
    hybrid = SimSettings(rto=10.0, transport='hybrid')
    assert rides_microtubule(hybrid, MoleculeKind.INFO)
    assert not rides_microtubule(hybrid, MoleculeKind.ACK)
    direct = SimSettings(rto=10.0, transport='directional')
    assert rides_microtubule(direct, MoleculeKind.ACK)
    assert not rides_microtubule(SimSettings(rto=10.0), MoleculeKind.INFO)


def test_brownian_single_step_variance():
    settings = SimSettings(rto=10.0)
    world = init_world(settings)
    start = np.array([30.0, 30.0, 30.0])
    mol = world.add_molecule(MoleculeKind.INFO, start)
    rng = make_rng(7, 'variance')
    steps = np.empty((10000, 3))
    for i in range(10000):
        world.move(mol, start)
        diffusive_step(mol, world, rng)
        steps[i] = mol.position - start
    expected = 2 * settings.diffusion_coeff * settings.dt
    assert abs(steps.mean()) < 0.01
    assert np.var(steps) == pytest.approx(expected, rel=0.05)


def test_brownian_k_step_variance():
    settings = SimSettings(rto=10.0)
    world = init_world(settings)
    start = np.array([30.0, 30.0, 30.0])
    mol = world.add_molecule(MoleculeKind.INFO, start)
    rng = make_rng(8, 'variance')
    k = 5
    disp = np.empty((10000, 3))
    for i in range(10000):
        world.move(mol, start)
        for _ in range(k):
            diffusive_step(mol, world, rng)
        disp[i] = mol.position - start
    assert np.var(disp) == pytest.approx(2 * settings.diffusion_coeff * settings.dt * k, rel=0.05)


def test_diffusion_never_overlaps_noise():
    settings = SimSettings(rto=10.0, env_side=30.0, tx_rx_distance=10.0, noise_count=2000, seed=5)
    world = init_world(settings)
    rng = make_rng(0, 'crowd')
    start = next(p for p in rng.uniform(1.0, 29.0, size=(1000, 3)) if world.is_free(p, 0.5))
    mol = world.add_molecule(MoleculeKind.INFO, start)
    for _ in range(500):
        diffusive_step(mol, world, rng)
        assert world.inside(mol.position, mol.radius)
        assert world.overlapping_ids(mol.position, mol.radius, ignore_id=mol.id) == []


def test_reattach_then_motor_step():
    world = init_world(directional())
    mt = world.microtubule
    mid = mt.point_at(mt.length / 2)
    mol = world.add_molecule(MoleculeKind.INFO, mid + np.array([0.0, 0.05, 0.0]))
    try_reattach(mol, mt, world, make_rng(0, 'attach'))
    assert mol.motion == MotionState.ON_MICROTUBULE
    assert mol.direction == 1 and mol.remaining_distance == 10.0
    assert mt.distance_to(mol.position) == pytest.approx(0.0, abs=1e-12)

    directional_step(mol, mt, world, make_rng(0, 'step'))
    assert mt.project(mol.position) == pytest.approx(mt.length / 2 + 0.1)
    assert mol.remaining_distance == pytest.approx(9.9)


def test_far_molecule_does_not_reattach():
    world = init_world(directional())
    mt = world.microtubule
    mol = world.add_molecule(MoleculeKind.ACK, mt.point_at(mt.length / 2) + np.array([0.0, 2.0, 0.0]))
    try_reattach(mol, mt, world, make_rng(0, 'attach'))
    assert mol.motion == MotionState.DIFFUSING


def test_detect_arrivals_removes_addressed_molecules():
    settings = SimSettings(rto=10.0, tx_rx_distance=20.0)
    world = init_world(settings)
    reach = settings.rx_radius + settings.mol_radius - 0.01
    info = world.add_molecule(MoleculeKind.INFO, world.rx_center - np.array([reach, 0.0, 0.0]))
    # an ACK next to the Rx is not addressed to it
    world.add_molecule(MoleculeKind.ACK, world.rx_center + np.array([0.0, reach, 0.0]))
    assert detect_arrivals(world) == [(info.id, Endpoint.RX)]
    assert info.id not in world.molecules and len(world.molecules) == 1


class OutwardRng:
    """Generator stand-in whose Gaussian draws always push past the box wall."""

    def __init__(self):
        self.draws = 0

    def normal(self, loc=0.0, scale=1.0, size=None):
        self.draws += 1
        return np.full(size, -100.0)


def test_diffusive_step_stays_put_when_every_redraw_fails():
    world = init_world(SimSettings(rto=10.0))
    start = np.array([1.0, 1.0, 1.0])
    mol = world.add_molecule(MoleculeKind.INFO, start)
    rng = OutwardRng()
    diffusive_step(mol, world, rng)
    assert np.array_equal(mol.position, start)
    assert rng.draws == 1 + MAX_REDRAWS


def test_exponential_travel_distance_mean():
    settings = SimSettings(rto=10.0, transport='directional', motor_travel_mean=4.0)
    rng = make_rng(3, 'travel')
    draws = [sample_travel_distance(settings, rng) for _ in range(100000)]
    assert np.mean(draws) == pytest.approx(4.0, rel=0.02)
    fixed = directional(motor_travel_mean=7.0)
    assert sample_travel_distance(fixed, rng) == 7.0


def test_motor_detaches_when_noise_blocks_the_track():
    world = init_world(directional())
    mt = world.microtubule
    mid = mt.length / 2
    world.add_noise(mt.point_at(mid + 1.05))
    mol = world.add_molecule(MoleculeKind.INFO, mt.point_at(mid))
    mol.motion = MotionState.ON_MICROTUBULE
    mol.direction = 1
    mol.remaining_distance = 10.0
    directional_step(mol, mt, world, make_rng(0, 'step'))
    assert mol.motion == MotionState.DIFFUSING
    assert mt.project(mol.position) == pytest.approx(mid)


def test_hybrid_ack_never_reattaches():
    world = init_world(SimSettings(rto=100.0, transport='hybrid'))
    mt = world.microtubule
    mol = world.add_molecule(MoleculeKind.ACK, mt.point_at(mt.length / 2) + np.array([0.0, 0.05, 0.0]))
    try_reattach(mol, mt, world, make_rng(0, 'attach'))
    assert mol.motion == MotionState.DIFFUSING


def test_simultaneous_arrivals_are_ordered_by_id():
    settings = SimSettings(rto=10.0, tx_rx_distance=20.0)
    world = init_world(settings)
    reach = settings.rx_radius + settings.mol_radius - 0.01
    first = world.add_molecule(MoleculeKind.INFO, world.rx_center - np.array([reach, 0.0, 0.0]))
    second = world.add_molecule(MoleculeKind.INFO, world.rx_center + np.array([0.0, reach, 0.0]))
    assert detect_arrivals(world) == [(first.id, Endpoint.RX), (second.id, Endpoint.RX)]
    assert world.molecules == {}


def test_directional_release_queue():
    settings = directional(duplicates=3)
    world = init_world(settings)
    rng = make_rng(0, 'queue')
    release_burst(world, MoleculeKind.INFO, 0, 0, rng)
    assert len(world.molecules) == 1
    assert len(world.pending[Endpoint.TX]) == 2
    assert world.emitted[MoleculeKind.INFO] == 3
    arrived = []
    for _ in range(30):
        arrived.extend(step_world(world, rng))
    assert len(world.pending[Endpoint.TX]) == 0
    assert len(world.molecules) + len(arrived) == 3
    assert world.molecules[min(world.molecules)].motion == MotionState.ON_MICROTUBULE


def test_directional_travel_hits_deterministic_rtt():
    """Motors that never detach cover the contact gap at exactly motor_velocity."""
    for seed in range(100):
        settings = directional(seed=seed)
        outcome = run_simulation(settings)
        lower = 2 * settings.contact_gap / settings.motor_velocity
        assert outcome.delivered
        assert outcome.rtt >= lower - 1e-9
        assert outcome.rtt <= 1.1 * lower


def test_directional_exponential_detachment_is_seeded():
    settings = directional(motor_travel_mode='exponential', motor_travel_mean=4.0, duplicates=3, seed=11)
    assert run_simulation(settings) == run_simulation(settings)


def main():
    from tests.helpers import run_module_tests
    return run_module_tests(globals(), "Simulation Core Tests")


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
