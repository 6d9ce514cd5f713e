"""
Dataset Generation Module
=========================

Turns a task's simulation grid into (feature vector, median RTT) samples and
stores them as per-task train/test CSV files.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..arq import EnsembleStats, run_ensemble
from ..nn import FEATURE_NAMES, TARGET_NAME, Dataset, EmptyDataset, Normalizer, encode_features
from ..simcore import SimSettings
from ..utils.console import console, progress
from ..utils.seeding import derive_seed, make_rng
from .tasks import TaskSpec

COLUMNS = FEATURE_NAMES + [TARGET_NAME]
FLOAT_FORMAT = '%.17g'


class MissingDatasetError(FileNotFoundError):
    """A task's dataset files are not on disk."""


def dataset_paths(directory: str, task_id: str) -> Tuple[Path, Path]:
    base = Path(directory)
    return base / f"{task_id}_train.csv", base / f"{task_id}_test.csv"


@dataclass
class TaskDataset:
    """Raw (unnormalized) samples of one task, already split into train and test."""

    task_id: str
    train: pd.DataFrame
    test: pd.DataFrame
    dropped: List[Dict[str, float]] = field(default_factory=list)

    @classmethod
    def from_arrays(cls, task_id: str, features: np.ndarray, targets: np.ndarray,
                    test_fraction: float = 0.2, seed: int = 0) -> 'TaskDataset':
        """
        Split samples into train and test with a seeded permutation. A single
        sample serves as both.
        """
        frame = pd.DataFrame(np.atleast_2d(np.asarray(features, dtype=float)), columns=FEATURE_NAMES)
        frame[TARGET_NAME] = np.asarray(targets, dtype=float)
        n = len(frame)
        if n == 0:
            raise EmptyDataset(f"Task {task_id} has no samples")
        if n == 1:
            return cls(task_id, frame, frame.copy())
        n_test = min(max(1, int(round(n * test_fraction))), n - 1)
        order = make_rng(seed, 'split', task_id).permutation(n)
        test_rows = np.sort(order[:n_test])
        train_rows = np.sort(order[n_test:])
        return cls(task_id, frame.iloc[train_rows].reset_index(drop=True),
                   frame.iloc[test_rows].reset_index(drop=True))

    @property
    def shared(self) -> bool:
        """True when train and test are the same single sample."""
        return len(self.train) == 1 and self.train.equals(self.test)

    def __len__(self) -> int:
        return len(self.train) if self.shared else len(self.train) + len(self.test)

    @staticmethod
    def _to_dataset(frame: pd.DataFrame, norm: Normalizer) -> Dataset:
        return Dataset(norm.normalize(frame[FEATURE_NAMES].to_numpy(dtype=float)),
                       norm.normalize_target(frame[TARGET_NAME].to_numpy(dtype=float)))

    def train_set(self, norm: Normalizer) -> Dataset:
        return self._to_dataset(self.train, norm)

    def test_set(self, norm: Normalizer) -> Dataset:
        return self._to_dataset(self.test, norm)

    def save(self, directory: str) -> List[str]:
        train_path, test_path = dataset_paths(directory, self.task_id)
        train_path.parent.mkdir(parents=True, exist_ok=True)
        self.train[COLUMNS].to_csv(train_path, index=False, float_format=FLOAT_FORMAT)
        self.test[COLUMNS].to_csv(test_path, index=False, float_format=FLOAT_FORMAT)
        return [str(train_path), str(test_path)]

    @classmethod
    def load(cls, directory: str, task_id: str) -> 'TaskDataset':
        train_path, test_path = dataset_paths(directory, task_id)
        for path in (train_path, test_path):
            if not path.exists():
                raise MissingDatasetError(f"Dataset file not found: {path}")
        train = pd.read_csv(train_path, dtype=float, float_precision='round_trip')
        test = pd.read_csv(test_path, dtype=float, float_precision='round_trip')
        if list(train.columns) != COLUMNS or list(test.columns) != COLUMNS:
            raise ValueError(f"Dataset for {task_id} does not have the expected columns")
        return cls(task_id, train, test)


def _point_stats(settings: SimSettings, runs: int) -> EnsembleStats:
    stats = run_ensemble(settings, runs, parallelism=1, strict=False)
    stats.outcomes = []
    return stats


def grid_settings(task: TaskSpec, seed: int) -> List[SimSettings]:
    """Grid points with per-point seeds derived from the task seed."""
    return [point.with_seed(derive_seed(seed, 'dataset', task.task_id, i))
            for i, point in enumerate(task.grid_points())]


def generate_dataset(task: TaskSpec, seed: int = 0, parallelism: int = 1,
                     runs_per_point: Optional[int] = None) -> TaskDataset:
    """
    Simulate every grid point of ``task`` and collect one sample per valid point.

    Points whose delivery rate is below 0.5 are dropped and reported; the
    dataset is deterministic given ``seed``.

    Raises:
        EmptyDataset: when every grid point is invalid.
    """
    runs = runs_per_point or task.runs_per_point
    points = grid_settings(task, seed)
    console.step(f"Generating {task.task_id}: {len(points)} grid points x {runs} runs")

    if parallelism > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            all_stats = list(pool.map(_point_stats, points, [runs] * len(points)))
    else:
        all_stats = [_point_stats(p, runs) for p in progress(points, desc=f"📊 {task.task_id}")]

    features, targets, dropped = [], [], []
    for point, stats in zip(points, all_stats):
        if not stats.valid:
            dropped.append({'tx_rx_distance': point.tx_rx_distance,
                            'noise_count': point.noise_count,
                            'delivery_rate': stats.delivery_rate})
            console.warning(f"{task.task_id}: dropped d={point.tx_rx_distance} "
                            f"noise={point.noise_count} (delivery {stats.delivery_rate:.2f})")
            continue
        features.append(encode_features(point))
        targets.append(stats.median_rtt)

    if not features:
        raise EmptyDataset(f"Every grid point of task {task.task_id} was invalid")
    dataset = TaskDataset.from_arrays(task.task_id, np.array(features), np.array(targets),
                                      test_fraction=task.test_fraction, seed=seed)
    dataset.dropped = dropped
    console.success(f"{task.task_id}: {len(features)} samples, {len(dropped)} dropped")
    return dataset


def load_datasets(directory: str, task_ids: Sequence[str]) -> Dict[str, TaskDataset]:
    return {task_id: TaskDataset.load(directory, task_id) for task_id in task_ids}
