#!/usr/bin/env python3
"""
SW-ARQ Protocol Tests
=====================

Protocol timing over a scripted channel, plus ensemble reduction and
validity checks over the physical one.
"""

import sys

import pytest

from src.arq import (
    InvalidSample,
    MIN_DELIVERY_RATE,
    ScriptedTransport,
    SimOutcome,
    run_ensemble,
    run_simulation,
    summarize_outcomes,
)
from src.simcore import MoleculeKind, SimSettings


def scripted(rto: float = 10.0, max_retx: int = 5) -> SimSettings:
    return SimSettings(rto=rto, max_retx=max_retx)


def fast_directional(**overrides) -> SimSettings:
    data = dict(rto=100.0, transport='directional', duplicates=1,
                motor_travel_mode='fixed', motor_travel_mean=10.0)
    data.update(overrides)
    return SimSettings(**data)


# ----------------------------------------------------------------------
# state machines
# ----------------------------------------------------------------------

def test_lost_information_is_censored_after_max_retx():
    channel = ScriptedTransport(info_delays=[], ack_delays=[])
    outcome = run_simulation(scripted(), channel)
    assert not outcome.delivered
    assert outcome.rtt is None
    assert outcome.retransmissions == 5
    assert outcome.censored_at == pytest.approx(60.0)
    assert outcome.tx_release_times == pytest.approx([0.0, 10.0, 20.0, 30.0, 40.0, 50.0])
    assert [r[0] for r in channel.releases] == [MoleculeKind.INFO] * 6
    assert outcome.info_emitted == 6 * 10
    assert outcome.value == outcome.censored_at


def test_first_ack_ends_the_run():
    outcome = run_simulation(scripted(), ScriptedTransport([3.0], [2.25]))
    assert outcome.delivered
    assert outcome.rtt == 5.25
    assert outcome.retransmissions == 0
    assert outcome.info_arrival_time == 3.0
    assert outcome.rx_release_times == [3.0]
    assert outcome.censored_at is None


def test_retransmitted_information_is_measured_from_first_release():
    outcome = run_simulation(scripted(), ScriptedTransport([None, 4.0], [1.0]))
    assert outcome.delivered
    assert outcome.rtt == 15.0
    assert outcome.retransmissions == 1
    assert outcome.tx_release_times == [0.0, 10.0]


def test_receiver_repeats_acks_every_rto():
    outcome = run_simulation(scripted(), ScriptedTransport([1.0], [None, None, 2.0]))
    assert outcome.delivered
    assert outcome.rx_release_times == [1.0, 11.0, 21.0]
    assert outcome.rtt == 23.0
    # the Tx kept retransmitting while the ACKs were lost
    assert outcome.retransmissions == 2


def test_duplicate_information_arrivals_are_acked_once():
    outcome = run_simulation(scripted(), ScriptedTransport([1.0, 0.5], [12.0]))
    assert outcome.delivered
    # the retransmitted copy at 10.5 is ignored; 11.0 is the ACK timer
    assert outcome.rx_release_times == [1.0, 11.0]
    assert outcome.info_arrival_time == 1.0
    assert outcome.rtt == 13.0


def test_ack_retransmissions_are_capped():
    outcome = run_simulation(scripted(max_retx=2), ScriptedTransport([1.0], []))
    assert not outcome.delivered
    assert outcome.rx_release_times == [1.0, 11.0, 21.0]
    assert outcome.censored_at == pytest.approx(30.0)


# ----------------------------------------------------------------------
# ensembles
# ----------------------------------------------------------------------

def _outcome(rtt=None, censored=None) -> SimOutcome:
    return SimOutcome(delivered=rtt is not None, rtt=rtt, censored_at=censored, retransmissions=0)


def test_summarize_outcomes_uses_delivered_runs_only():
    outcomes = [_outcome(1.0), _outcome(2.0), _outcome(3.0), _outcome(4.0), _outcome(censored=60.0)]
    stats = summarize_outcomes(outcomes)
    assert stats.runs == 5 and stats.delivered == 4
    assert stats.delivery_rate == pytest.approx(0.8)
    assert stats.median_rtt == pytest.approx(2.5)
    assert stats.q1 == pytest.approx(1.75)
    assert stats.q3 == pytest.approx(3.25)
    assert stats.valid


def test_summarize_outcomes_flags_low_delivery():
    stats = summarize_outcomes([_outcome(1.0), _outcome(censored=5.0), _outcome(censored=5.0)])
    assert stats.delivery_rate < MIN_DELIVERY_RATE
    assert not stats.valid
    empty = summarize_outcomes([_outcome(censored=5.0)])
    assert empty.median_rtt is None
    with pytest.raises(ValueError):
        summarize_outcomes([])


def test_invalid_sample_raised_when_nothing_delivers():
    settings = SimSettings(rto=0.1, max_retx=0)
    with pytest.raises(InvalidSample) as info:
        run_ensemble(settings, runs=3)
    assert info.value.stats.delivery_rate == 0.0
    lenient = run_ensemble(settings, runs=3, strict=False)
    assert not lenient.valid and lenient.median_rtt is None


def test_ensemble_is_deterministic():
    settings = fast_directional(seed=4)
    first = run_ensemble(settings, runs=4)
    second = run_ensemble(settings, runs=4)
    assert first.to_dict() == second.to_dict()
    assert first.outcomes == second.outcomes
    assert [o.seed for o in first.outcomes] == [4, 5, 6, 7]
    assert first.median_rtt == pytest.approx(8.0, rel=0.1)


def test_parallel_ensemble_matches_serial():
    settings = fast_directional(motor_travel_mode='exponential', motor_travel_mean=4.0,
                                duplicates=2, seed=9)
    serial = run_ensemble(settings, runs=4, parallelism=1, strict=False)
    parallel = run_ensemble(settings, runs=4, parallelism=2, strict=False)
    assert serial.outcomes == parallel.outcomes
    assert serial.to_dict() == parallel.to_dict()


def test_runs_frame_and_csv_row():
    settings = fast_directional()
    stats = run_ensemble(settings, runs=3)
    frame = stats.runs_frame()
    assert list(frame['run']) == [0, 1, 2]
    assert frame['delivered'].all()
    row = stats.csv_row(settings)
    assert row['transport'] == 'directional'
    assert row['median_rtt'] == stats.median_rtt


def main():
    from tests.helpers import run_module_tests
    return run_module_tests(globals(), "SW-ARQ Protocol Tests")


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
