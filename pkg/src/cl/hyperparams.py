"""
CL Hyperparameters Module
=========================

Strategy-specific hyperparameters. The defaults are the tuned values for the
full twelve-task sequence; ``patience`` is the early-stopping window.
"""

from dataclasses import dataclass, asdict, fields
from typing import Any, Dict


@dataclass(frozen=True)
class Hyperparams:
    lwf_lambda: float = 0.9
    lwf_previous_only: bool = False
    ewc_lambda: float = 0.75
    clear_lambda: float = 2.0
    clear_alpha: float = 0.5
    clear_buffer: int = 50
    clear_retrain_epochs: int = 10
    der_alpha: float = 200.0
    der_beta: float = 200.0
    der_buffer: int = 5
    patience: int = 10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, bool) and value < 0:
                raise ValueError(f"Hyperparameter '{f.name}' must be nonnegative")
        if not 0.0 <= self.lwf_lambda <= 1.0:
            raise ValueError("lwf_lambda must lie in [0, 1]")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Hyperparams':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown hyperparameters: {sorted(unknown)}")
        return cls(**data)
