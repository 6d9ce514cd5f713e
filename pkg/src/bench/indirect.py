"""
Indirect Learning Module
========================

How much training on related tasks helps a task that is never trained: the
target's test error after the first prefix task minus its error after the
whole three-task prefix. Positive values mean indirect improvement.
"""

from dataclasses import dataclass, asdict
from typing import Any, Dict, Mapping, Optional

from ..cl import Hyperparams, create_strategy
from ..utils.console import console
from .dataset import MissingDatasetError, TaskDataset
from .scenario import SequentialLearner
from .tasks import IndirectSpec, TrainingSection


@dataclass
class IndirectResult:
    label: str
    strategy: str
    seed: int
    mse_after_first: float
    mse_after_prefix: float

    @property
    def delta(self) -> float:
        return self.mse_after_first - self.mse_after_prefix

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['delta'] = self.delta
        return data


def indirect_learning(spec: IndirectSpec, datasets: Mapping[str, TaskDataset],
                      strategy: str = 'baseline', hyper: Optional[Hyperparams] = None,
                      training: Optional[TrainingSection] = None, seed: int = 0,
                      learner: Optional[SequentialLearner] = None) -> IndirectResult:
    """Train through ``spec.prefix`` and measure the target task's error change."""
    needed = list(spec.prefix) + [spec.target]
    missing = [t for t in needed if t not in datasets]
    if missing:
        raise MissingDatasetError(f"No dataset for tasks: {missing}")
    training = training or TrainingSection()
    learner = learner or SequentialLearner(create_strategy(strategy, hyper), training, seed)
    target = datasets[spec.target]

    learner.learn(0, datasets[spec.prefix[0]])
    after_first = learner.evaluate(target)
    for index, task_id in enumerate(spec.prefix[1:], start=1):
        learner.learn(index, datasets[task_id])
    after_prefix = learner.evaluate(target)

    result = IndirectResult(label=spec.label, strategy=learner.strategy.name, seed=seed,
                            mse_after_first=after_first, mse_after_prefix=after_prefix)
    console.info(f"{spec.label} [{result.strategy}]: delta = {result.delta:.6g}")
    return result
