"""
Scenario Suite Module
=====================

Trains one model incrementally through a task sequence. After task K' the
model is tested on every task k <= K' without being told which task an input
belongs to; those test errors form row K' of the evaluation matrix.
"""

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..cl import BaselineStrategy, Hyperparams, create_strategy
from ..nn import (
    Model,
    Normalizer,
    TrainHistory,
    evaluate_mse,
    load_checkpoint,
    save_checkpoint,
    train_task,
)
from ..utils.console import console
from ..utils.seeding import derive_seed, make_rng
from .dataset import MissingDatasetError, TaskDataset
from .tasks import TaskSequence, TrainingSection

PROGRESS_FILE = 'progress.json'


class EvalMatrix:
    """
    Lower-triangular matrix of test MSEs; ``rows[K'-1][k-1]`` is the error on
    task k after training through task K'. Rows are append-only.
    """

    def __init__(self, task_ids: Sequence[str], rows: Optional[Sequence[Sequence[float]]] = None):
        self.task_ids: Tuple[str, ...] = tuple(task_ids)
        self._rows: List[Tuple[float, ...]] = []
        for row in rows or []:
            self.append_row(row)

    def append_row(self, row: Sequence[float]) -> None:
        expected = len(self._rows) + 1
        if len(row) != expected:
            raise ValueError(f"Row {expected} must have {expected} entries, got {len(row)}")
        if expected > len(self.task_ids):
            raise ValueError("Matrix already has a row for every task")
        values = tuple(float(v) for v in row)
        if any(v < 0 or not np.isfinite(v) for v in values):
            raise ValueError("Test errors must be finite and nonnegative")
        self._rows.append(values)

    @property
    def rows(self) -> List[Tuple[float, ...]]:
        return list(self._rows)

    @property
    def size(self) -> int:
        return len(self._rows)

    @property
    def complete(self) -> bool:
        return self.size == len(self.task_ids)

    def entry(self, scenario: int, task: int) -> float:
        """Error on task ``task`` after scenario ``scenario`` (both 1-based)."""
        if not 1 <= task <= scenario <= self.size:
            raise IndexError(f"No entry for scenario {scenario}, task {task}")
        return self._rows[scenario - 1][task - 1]

    def diagonal(self) -> np.ndarray:
        return np.array([row[-1] for row in self._rows])

    def last_row(self) -> np.ndarray:
        return np.array(self._rows[-1]) if self._rows else np.array([])

    def prefix(self, k: int) -> 'EvalMatrix':
        return EvalMatrix(self.task_ids[:k], self._rows[:k])

    def as_array(self) -> np.ndarray:
        """Square array with NaN above the diagonal."""
        out = np.full((self.size, self.size), np.nan)
        for i, row in enumerate(self._rows):
            out[i, :len(row)] = row
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {'task_ids': list(self.task_ids), 'rows': [list(r) for r in self._rows]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'EvalMatrix':
        return cls(data['task_ids'], data['rows'])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EvalMatrix) and self.to_dict() == other.to_dict()


@dataclass
class ScenarioResult:
    strategy: str
    seed: int
    matrix: EvalMatrix
    task_seconds: List[float] = field(default_factory=list)
    histories: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def total_seconds(self) -> float:
        return float(sum(self.task_seconds))

    def matrix_payload(self) -> Dict[str, Any]:
        """Deterministic matrix artifact (no wall-clock values)."""
        payload = self.matrix.to_dict()
        payload.update(strategy=self.strategy, seed=self.seed)
        return payload

    def timing_payload(self) -> Dict[str, Any]:
        return {
            'strategy': self.strategy,
            'seed': self.seed,
            'task_ids': list(self.matrix.task_ids[:len(self.task_seconds)]),
            'task_seconds': list(self.task_seconds),
            'total_seconds': self.total_seconds,
        }


class SequentialLearner:
    """A model and its strategy moving through tasks one at a time."""

    def __init__(self, strategy: BaselineStrategy, training: TrainingSection, seed: int,
                 model: Optional[Model] = None):
        self.strategy = strategy
        self.training = training
        self.seed = seed
        self.norm = Normalizer.default(rtt_max=training.rtt_max)
        self.model = model if model is not None else Model.initialize(make_rng(seed, 'init'), self.norm)
        if self.model.norm is None:
            self.model.norm = self.norm

    def learn(self, index: int, dataset: TaskDataset) -> Tuple[TrainHistory, float]:
        """Train on task number ``index`` (0-based); returns the history and wall seconds."""
        config = self.training.train_config(derive_seed(self.seed, self.strategy.name, index),
                                            patience=self.strategy.hyper.patience)
        train_set = dataset.train_set(self.norm)
        started = time.perf_counter()
        best, history = train_task(self.model, train_set, self.strategy, config)
        self.strategy.on_task_end(best, train_set)
        elapsed = time.perf_counter() - started
        self.model = best
        return history, elapsed

    def evaluate(self, dataset: TaskDataset) -> float:
        return evaluate_mse(self.model, dataset.test_set(self.norm))


def _checkpoint_path(out_dir: Path, index: int, task_id: str) -> Path:
    return out_dir / 'checkpoints' / f"{index + 1:02d}_{task_id}.json"


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding='utf-8')


def run_scenario_suite(sequence: TaskSequence, datasets: Mapping[str, TaskDataset],
                       strategy: str = 'baseline', hyper: Optional[Hyperparams] = None,
                       training: Optional[TrainingSection] = None, seed: int = 0,
                       out_dir: Optional[str] = None, resume: bool = False) -> ScenarioResult:
    """
    Run scenarios 1..K for one strategy and fill the evaluation matrix.

    With ``out_dir`` a checkpoint is written after each task together with
    ``progress.json``; ``resume=True`` continues from the last completed task
    and reproduces the remaining rows exactly.

    Raises:
        MissingDatasetError: when a task of the sequence has no dataset.
    """
    missing = [t for t in sequence.task_ids if t not in datasets]
    if missing:
        raise MissingDatasetError(f"No dataset for tasks: {missing}")
    training = training or TrainingSection()
    learner = SequentialLearner(create_strategy(strategy, hyper), training, seed)
    result = ScenarioResult(strategy=strategy, seed=seed, matrix=EvalMatrix(sequence.task_ids))

    out_path = Path(out_dir) if out_dir else None
    start = 0
    if resume and out_path is not None and (out_path / PROGRESS_FILE).exists():
        start = _restore(out_path, sequence, learner, result)

    for index in range(start, len(sequence)):
        spec = sequence.tasks[index]
        console.step(f"[{strategy}] scenario {index + 1}/{len(sequence)}: training {spec.task_id}")
        history, elapsed = learner.learn(index, datasets[spec.task_id])
        row = [learner.evaluate(datasets[t]) for t in sequence.task_ids[:index + 1]]
        result.matrix.append_row(row)
        result.task_seconds.append(elapsed)
        result.histories.append(history.to_dict())
        if out_path is not None:
            save_checkpoint(learner.model, str(_checkpoint_path(out_path, index, spec.task_id)),
                            strategy=learner.strategy,
                            extra={'task_id': spec.task_id, 'scenario': index + 1})
            _write_json(out_path / PROGRESS_FILE, {
                'strategy': strategy,
                'seed': seed,
                'completed': index + 1,
                'matrix': result.matrix.to_dict(),
                'task_seconds': result.task_seconds,
                'histories': result.histories,
            })
    return result


def _restore(out_path: Path, sequence: TaskSequence, learner: SequentialLearner,
             result: ScenarioResult) -> int:
    progress = json.loads((out_path / PROGRESS_FILE).read_text(encoding='utf-8'))
    if progress['strategy'] != result.strategy or progress['seed'] != result.seed:
        raise ValueError("Resume directory belongs to a different strategy or seed")
    if progress['matrix']['task_ids'] != sequence.task_ids:
        raise ValueError("Resume directory belongs to a different task sequence")
    completed = int(progress['completed'])
    if completed == 0:
        return 0
    task_id = sequence.task_ids[completed - 1]
    model, data = load_checkpoint(str(_checkpoint_path(out_path, completed - 1, task_id)))
    learner.model = model
    learner.strategy.load_state_dict(data.strategy_state or {})
    for row in progress['matrix']['rows']:
        result.matrix.append_row(row)
    result.task_seconds = [float(s) for s in progress['task_seconds']]
    result.histories = list(progress['histories'])
    console.warning(f"Resuming {result.strategy} after {completed} completed task(s)")
    return completed
