"""
Simulation Settings Module
==========================

Defines ``SimSettings``, the full physical and protocol parameterization of a
single simulation run. Lengths are in micrometres, times in seconds.
"""

import json
from dataclasses import dataclass, asdict, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional


class SettingsError(ValueError):
    """Raised when a SimSettings invariant does not hold."""


class Transport(str, Enum):
    DIFFUSIVE = 'diffusive'
    DIRECTIONAL = 'directional'
    HYBRID = 'hybrid'


class TravelMode(str, Enum):
    EXPONENTIAL = 'exponential'
    FIXED = 'fixed'


@dataclass(frozen=True)
class SimSettings:
    """
    Parameterization of one single-message SW-ARQ simulation.

    ``rto`` has no meaningful universal value and must always be given.
    """

    rto: float
    env_side: float = 150.0
    tx_rx_distance: float = 10.0
    tx_diameter: float = 5.0
    rx_diameter: float = 5.0
    mol_diameter: float = 1.0
    noise_count: int = 0
    noise_diameter: float = 1.0
    diffusion_coeff: float = 0.5
    motor_velocity: float = 1.0
    motor_travel_mean: float = 4.0
    motor_travel_mode: TravelMode = TravelMode.EXPONENTIAL
    capture_radius: float = 0.1
    transport: Transport = Transport.DIFFUSIVE
    duplicates: int = 10
    max_retx: int = 5
    dt: float = 0.1
    seed: int = 0
    placement_retries: int = 1000

    def __post_init__(self):
        # accept plain strings coming from JSON
        object.__setattr__(self, 'transport', Transport(self.transport))
        object.__setattr__(self, 'motor_travel_mode', TravelMode(self.motor_travel_mode))
        self._validate()

    def _validate(self) -> None:
        nonnegative = [
            'rto', 'env_side', 'tx_rx_distance', 'tx_diameter', 'rx_diameter',
            'mol_diameter', 'noise_count', 'noise_diameter', 'motor_velocity',
            'motor_travel_mean', 'capture_radius', 'max_retx', 'seed',
        ]
        for name in nonnegative:
            if getattr(self, name) < 0:
                raise SettingsError(f"Field '{name}' must be nonnegative, got {getattr(self, name)}")
        if self.diffusion_coeff <= 0:
            raise SettingsError("Diffusion coefficient must be positive")
        if self.dt <= 0:
            raise SettingsError("Time step dt must be positive")
        if self.duplicates < 1:
            raise SettingsError("At least one duplicate per burst is required")
        if self.rto <= 0:
            raise SettingsError("RTO must be positive")
        if self.placement_retries < 1:
            raise SettingsError("placement_retries must be at least 1")
        if self.tx_rx_distance + self.tx_radius + self.rx_radius >= self.env_side:
            raise SettingsError("Tx and Rx do not fit inside the environment")
        if self.tx_rx_distance <= self.tx_radius + self.rx_radius:
            raise SettingsError("Tx and Rx overlap each other")

    @property
    def tx_radius(self) -> float:
        return self.tx_diameter / 2.0

    @property
    def rx_radius(self) -> float:
        return self.rx_diameter / 2.0

    @property
    def mol_radius(self) -> float:
        return self.mol_diameter / 2.0

    @property
    def noise_radius(self) -> float:
        return self.noise_diameter / 2.0

    @property
    def contact_gap(self) -> float:
        """Free path of a molecule centre between touching Tx and touching Rx."""
        return self.tx_rx_distance - self.tx_radius - self.rx_radius - 2.0 * self.mol_radius

    @property
    def uses_microtubule(self) -> bool:
        return self.transport in (Transport.DIRECTIONAL, Transport.HYBRID)

    def with_seed(self, seed: int) -> 'SimSettings':
        return replace(self, seed=seed)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['transport'] = self.transport.value
        data['motor_travel_mode'] = self.motor_travel_mode.value
        return data

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def field_names(cls) -> list:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimSettings':
        unknown = set(data) - set(cls.field_names())
        if unknown:
            raise SettingsError(f"Unknown settings fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise SettingsError(str(e)) from e

    @classmethod
    def load(cls, filepath: str, overrides: Optional[Dict[str, Any]] = None) -> 'SimSettings':
        data = json.loads(Path(filepath).read_text(encoding='utf-8'))
        data.update(overrides or {})
        return cls.from_dict(data)
