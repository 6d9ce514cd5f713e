"""
Task Definitions Module
=======================

Estimation tasks and task sequences, plus the JSON file schema that carries
them together with the training section and strategy hyperparameters.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..cl import Hyperparams
from ..nn import DEFAULT_RTT_MAX, TrainConfig
from ..simcore import SettingsError, SimSettings, Transport


class ConfigError(ValueError):
    """Unreadable or invalid configuration file."""


class TaskSpec(BaseModel):
    """One estimation task: a grid of simulation settings."""

    task_id: str = Field(..., description="Unique task name, e.g. 'T1'")
    transport: Transport = Field(..., description="diffusive, directional or hybrid")
    distances: List[float] = Field(..., description="Tx-Rx centre distances (um)")
    noise_counts: List[int] = Field(default_factory=lambda: [0], description="Noise molecule counts")
    n: int = Field(10, description="Duplicated molecules per burst")
    rto: float = Field(..., description="Retransmission timeout (s)")
    max_retx: int = Field(5, description="Maximum retransmissions")
    runs_per_point: int = Field(500, description="Simulations per grid point")
    test_fraction: float = Field(0.2, description="Share of samples held out for testing")
    settings: Dict[str, Any] = Field(default_factory=dict,
                                     description="Extra SimSettings fields shared by every grid point")

    @field_validator('distances', 'noise_counts')
    @classmethod
    def _nonempty(cls, value: List[Any]) -> List[Any]:
        if not value:
            raise ValueError("grid axes must be nonempty")
        return value

    @field_validator('runs_per_point')
    @classmethod
    def _positive_runs(cls, value: int) -> int:
        if value < 1:
            raise ValueError("runs_per_point must be at least 1")
        return value

    @field_validator('test_fraction')
    @classmethod
    def _fraction(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("test_fraction must lie in (0, 1)")
        return value

    @model_validator(mode='after')
    def _grid_is_valid(self) -> 'TaskSpec':
        try:
            self.grid_points()
        except SettingsError as e:
            raise ValueError(f"task {self.task_id}: {e}") from e
        return self

    def grid_points(self, seed: int = 0) -> List[SimSettings]:
        """Every (distance, noise) combination as SimSettings, distance-major."""
        points = []
        for distance in self.distances:
            for noise in self.noise_counts:
                data = dict(self.settings)
                data.update(
                    transport=self.transport,
                    tx_rx_distance=float(distance),
                    noise_count=int(noise),
                    duplicates=self.n,
                    rto=self.rto,
                    max_retx=self.max_retx,
                    seed=seed,
                )
                points.append(SimSettings.from_dict(data))
        return points

    @property
    def grid_size(self) -> int:
        return len(self.distances) * len(self.noise_counts)


class TaskSequence(BaseModel):
    """Ordered tasks of one continual-learning stream."""

    tasks: List[TaskSpec]

    @field_validator('tasks')
    @classmethod
    def _unique(cls, tasks: List[TaskSpec]) -> List[TaskSpec]:
        if not tasks:
            raise ValueError("a task sequence needs at least one task")
        ids = [t.task_id for t in tasks]
        if len(set(ids)) != len(ids):
            raise ValueError(f"task ids must be unique: {ids}")
        return tasks

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def task_ids(self) -> List[str]:
        return [t.task_id for t in self.tasks]

    def task(self, task_id: str) -> TaskSpec:
        for spec in self.tasks:
            if spec.task_id == task_id:
                return spec
        raise KeyError(f"Unknown task '{task_id}'")

    def subsequence(self, task_ids: List[str]) -> 'TaskSequence':
        return TaskSequence(tasks=[self.task(t) for t in task_ids])


class TrainingSection(BaseModel):
    epochs: int = Field(100, description="Maximum epochs per task")
    batch_size: int = Field(128, description="Mini-batch size")
    learning_rate: float = Field(0.001, description="Gradient descent step size")
    validation_fraction: float = Field(0.2, description="Share of training data used for validation")
    rtt_max: float = Field(DEFAULT_RTT_MAX, description="Upper bound of the RTT normalization")

    def train_config(self, seed: int, patience: int = 10) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            patience=patience,
            validation_fraction=self.validation_fraction,
            seed=seed,
        )


class IndirectSpec(BaseModel):
    """Three training tasks followed by an unseen target task."""

    prefix: List[str] = Field(..., description="Three task ids trained in order")
    target: str = Field(..., description="Task id evaluated but never trained")

    @model_validator(mode='after')
    def _target_outside_prefix(self) -> 'IndirectSpec':
        if len(self.prefix) != 3:
            raise ValueError("indirect learning uses a three-task prefix")
        if self.target in self.prefix:
            raise ValueError("target task must not be part of the prefix")
        return self

    @property
    def label(self) -> str:
        return '->'.join(self.prefix) + '=>' + self.target


DEFAULT_INDIRECT = [
    IndirectSpec(prefix=['T1', 'T2', 'T3'], target='T4'),
    IndirectSpec(prefix=['T1', 'T4', 'T3'], target='T2'),
    IndirectSpec(prefix=['T1', 'T2', 'T4'], target='T3'),
    IndirectSpec(prefix=['T1', 'T4', 'T2'], target='T3'),
]


class TaskSequenceFile(TaskSequence):
    """Schema of a task-sequence config file."""

    training: TrainingSection = Field(default_factory=TrainingSection)
    hyperparams: Dict[str, Any] = Field(default_factory=dict)
    description: Optional[str] = None
    indirect: Optional[List[IndirectSpec]] = None

    def sequence(self) -> TaskSequence:
        return TaskSequence(tasks=self.tasks)

    def hyper(self) -> Hyperparams:
        try:
            return Hyperparams.from_dict(self.hyperparams)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid hyperparameters: {e}") from e

    def indirect_specs(self) -> List[IndirectSpec]:
        return self.indirect if self.indirect is not None else list(DEFAULT_INDIRECT)


def _read_json(path: str) -> Any:
    path_obj = Path(path)
    if not path_obj.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        return json.loads(path_obj.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e


def load_sequence_file(path: str) -> TaskSequenceFile:
    """
    Load and validate a task-sequence file.

    Raises:
        ConfigError: missing file, bad JSON or schema violation.
    """
    try:
        return TaskSequenceFile.model_validate(_read_json(path))
    except ValidationError as e:
        raise ConfigError(f"Invalid task-sequence file {path}: {e}") from e


class SimulateConfig(BaseModel):
    """Schema of a single-ensemble config file."""

    settings: Dict[str, Any] = Field(..., description="SimSettings fields")
    runs: int = Field(500, description="Independent simulations")

    @field_validator('runs')
    @classmethod
    def _positive_runs(cls, value: int) -> int:
        if value < 1:
            raise ValueError("runs must be at least 1")
        return value

    def sim_settings(self, seed: Optional[int] = None) -> SimSettings:
        data = dict(self.settings)
        if seed is not None:
            data['seed'] = seed
        try:
            return SimSettings.from_dict(data)
        except SettingsError as e:
            raise ConfigError(f"Invalid simulation settings: {e}") from e


def load_simulate_config(path: str) -> SimulateConfig:
    try:
        return SimulateConfig.model_validate(_read_json(path))
    except ValidationError as e:
        raise ConfigError(f"Invalid simulate config {path}: {e}") from e
