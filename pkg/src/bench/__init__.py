"""
Benchmark Package
=================

Task sequences, dataset generation from simulation ensembles, sequential
scenario evaluation and the forgetting metrics.
"""

from .tasks import (
    DEFAULT_INDIRECT,
    ConfigError,
    IndirectSpec,
    SimulateConfig,
    TaskSequence,
    TaskSequenceFile,
    TaskSpec,
    TrainingSection,
    load_sequence_file,
    load_simulate_config,
)
from .dataset import COLUMNS, MissingDatasetError, TaskDataset, generate_dataset, grid_settings, load_datasets
from .scenario import EvalMatrix, ScenarioResult, SequentialLearner, run_scenario_suite
from .metrics import (
    ZeroDiagonalError,
    forgetting_curve,
    forgetting_ratio,
    increase_rate,
    metrics_summary,
    per_task_errors,
    plasticity,
    stability,
)
from .indirect import IndirectResult, indirect_learning

__all__ = [
    'DEFAULT_INDIRECT', 'ConfigError', 'IndirectSpec', 'SimulateConfig', 'TaskSequence',
    'TaskSequenceFile', 'TaskSpec', 'TrainingSection', 'load_sequence_file', 'load_simulate_config',
    'COLUMNS', 'MissingDatasetError', 'TaskDataset', 'generate_dataset', 'grid_settings',
    'load_datasets',
    'EvalMatrix', 'ScenarioResult', 'SequentialLearner', 'run_scenario_suite',
    'ZeroDiagonalError', 'forgetting_curve', 'forgetting_ratio', 'increase_rate',
    'metrics_summary', 'per_task_errors', 'plasticity', 'stability',
    'IndirectResult', 'indirect_learning',
]
