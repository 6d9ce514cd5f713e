"""
Molecular Communication RTT Estimation - Source Package
=======================================================

Simulation of a stop-and-wait ARQ molecular communication protocol and
continual learning of round-trip-time estimators over sequential tasks.

Modules:
- simcore: particle-based physics (diffusive, directional, hybrid transports)
- arq: SW-ARQ state machines, single-run RTT and ensemble statistics
- nn: 12 -> 20 -> 1 regression network, training and checkpoints
- cl: Baseline, LWF, EWC, CLeaR and DER strategies
- bench: task sequences, datasets, scenario suites and forgetting metrics
- cli: commands behind main.py and the run manifest
- utils: console output and seeding helpers
"""

__version__ = "1.0.0"
__author__ = "Molecular Communication Research Team"
__description__ = "Continual-learning RTT estimation for molecular communication"
