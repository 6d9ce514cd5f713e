"""
Feature Encoding Module
=======================

Maps SimSettings onto the 12-value input vector and min-max normalizes it
against fixed global bounds. The bounds are global (not per task) so the input
space does not shift between tasks.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..simcore import SimSettings, Transport

FEATURE_NAMES: List[str] = [
    'env_side',
    'tx_rx_distance',
    'log_noise_count',
    'transport_diffusive',
    'transport_directional',
    'transport_hybrid',
    'duplicates',
    'rto',
    'max_retx',
    'diffusion_coeff',
    'motor_velocity',
    'motor_travel_mean',
]
TARGET_NAME = 'median_rtt'
N_FEATURES = len(FEATURE_NAMES)

# Global (min, max) per feature, covering the parameter ranges studied
FEATURE_BOUNDS: Dict[str, Tuple[float, float]] = {
    'env_side': (50.0, 300.0),
    'tx_rx_distance': (0.0, 100.0),
    'log_noise_count': (0.0, math.log10(1.0 + 1e5)),
    'transport_diffusive': (0.0, 1.0),
    'transport_directional': (0.0, 1.0),
    'transport_hybrid': (0.0, 1.0),
    'duplicates': (1.0, 20.0),
    'rto': (0.0, 1000.0),
    'max_retx': (0.0, 10.0),
    'diffusion_coeff': (0.0, 1.0),
    'motor_velocity': (0.0, 2.0),
    'motor_travel_mean': (0.0, 10.0),
}
DEFAULT_RTT_MAX = 1000.0

_TRANSPORT_ORDER = [Transport.DIFFUSIVE, Transport.DIRECTIONAL, Transport.HYBRID]


class FeatureRangeError(ValueError):
    """A feature or target value lies outside the configured global bounds."""


def encode_features(settings: SimSettings) -> np.ndarray:
    """Raw (unnormalized) feature vector for one simulation setting."""
    one_hot = [1.0 if settings.transport == t else 0.0 for t in _TRANSPORT_ORDER]
    return np.array([
        settings.env_side,
        settings.tx_rx_distance,
        math.log10(1.0 + settings.noise_count),
        *one_hot,
        settings.duplicates,
        settings.rto,
        settings.max_retx,
        settings.diffusion_coeff,
        settings.motor_velocity,
        settings.motor_travel_mean,
    ], dtype=float)


@dataclass
class Normalizer:
    """Per-feature and target min-max constants."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float = 0.0
    target_max: float = DEFAULT_RTT_MAX

    def __post_init__(self):
        self.feature_min = np.asarray(self.feature_min, dtype=float)
        self.feature_max = np.asarray(self.feature_max, dtype=float)
        if self.feature_min.shape != (N_FEATURES,) or self.feature_max.shape != (N_FEATURES,):
            raise ValueError(f"Normalizer needs {N_FEATURES} feature bounds")
        if np.any(self.feature_max <= self.feature_min):
            bad = [FEATURE_NAMES[i] for i in np.flatnonzero(self.feature_max <= self.feature_min)]
            raise ValueError(f"Feature bounds need max > min: {bad}")
        if self.target_max <= self.target_min:
            raise ValueError("Target bounds need max > min")

    @classmethod
    def default(cls, rtt_max: float = DEFAULT_RTT_MAX,
                overrides: Optional[Mapping[str, Tuple[float, float]]] = None) -> 'Normalizer':
        bounds = dict(FEATURE_BOUNDS)
        for name, pair in (overrides or {}).items():
            if name not in bounds:
                raise ValueError(f"Unknown feature '{name}'")
            bounds[name] = (float(pair[0]), float(pair[1]))
        return cls(
            feature_min=np.array([bounds[n][0] for n in FEATURE_NAMES]),
            feature_max=np.array([bounds[n][1] for n in FEATURE_NAMES]),
            target_min=0.0,
            target_max=float(rtt_max),
        )

    @property
    def span(self) -> np.ndarray:
        return self.feature_max - self.feature_min

    def normalize(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=float)
        low = np.any(features < self.feature_min - 1e-12, axis=-1)
        high = np.any(features > self.feature_max + 1e-12, axis=-1)
        if np.any(low | high):
            raise FeatureRangeError("Feature values outside the global normalization bounds")
        return (features - self.feature_min) / self.span

    def denormalize(self, normalized: np.ndarray) -> np.ndarray:
        return np.asarray(normalized, dtype=float) * self.span + self.feature_min

    def normalize_target(self, rtt: np.ndarray) -> np.ndarray:
        rtt = np.asarray(rtt, dtype=float)
        if np.any(rtt < self.target_min) or np.any(rtt > self.target_max):
            raise FeatureRangeError(
                f"RTT outside [{self.target_min}, {self.target_max}]; raise rtt_max")
        return (rtt - self.target_min) / (self.target_max - self.target_min)

    def denormalize_target(self, normalized: np.ndarray) -> np.ndarray:
        return np.asarray(normalized, dtype=float) * (self.target_max - self.target_min) + self.target_min

    def to_dict(self) -> Dict[str, Any]:
        return {
            'feature_names': list(FEATURE_NAMES),
            'feature_min': self.feature_min.tolist(),
            'feature_max': self.feature_max.tolist(),
            'target_min': self.target_min,
            'target_max': self.target_max,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'Normalizer':
        return cls(
            feature_min=np.array(data['feature_min'], dtype=float),
            feature_max=np.array(data['feature_max'], dtype=float),
            target_min=float(data['target_min']),
            target_max=float(data['target_max']),
        )
