"""
Checkpoint Module
=================

Versioned JSON checkpoints holding the network parameters, the normalization
constants and the strategy state. Floats are written with ``repr`` precision,
so a save/load round trip is bit-exact.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError

from .features import N_FEATURES, Normalizer
from .model import HIDDEN_UNITS, OUTPUT_UNITS, PARAM_ORDER, PARAM_SHAPES, Model

CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    """Unreadable or malformed checkpoint file."""


class SchemaVersionError(CheckpointError):
    """Checkpoint written by an incompatible schema version."""


class ShapeMismatchError(CheckpointError):
    """Parameter arrays do not match the declared dimensions."""


class Dims(BaseModel):
    input: int = Field(..., description="Number of input features")
    hidden: int = Field(..., description="Number of hidden units")
    output: int = Field(..., description="Number of outputs")


class CheckpointFile(BaseModel):
    """On-disk schema of a checkpoint."""

    version: int
    dims: Dims
    W1: List[List[float]]
    b1: List[float]
    W2: List[List[float]]
    b2: List[float]
    norm: Optional[Dict[str, Any]] = None
    strategy: Optional[str] = None
    strategy_state: Optional[Dict[str, Any]] = None
    extra: Dict[str, Any] = Field(default_factory=dict)


def checkpoint_payload(model: Model, strategy: Optional[Any] = None,
                       extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        'version': CHECKPOINT_VERSION,
        'dims': {'input': N_FEATURES, 'hidden': HIDDEN_UNITS, 'output': OUTPUT_UNITS},
        'norm': model.norm.to_dict() if model.norm is not None else None,
        'strategy': getattr(strategy, 'name', None),
        'strategy_state': strategy.state_dict() if strategy is not None else None,
        'extra': extra or {},
    }
    for name in PARAM_ORDER:
        payload[name] = getattr(model, name).tolist()
    return payload


def save_checkpoint(model: Model, path: str, strategy: Optional[Any] = None,
                    extra: Optional[Dict[str, Any]] = None) -> str:
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(checkpoint_payload(model, strategy, extra), sort_keys=True)
    path_obj.write_text(text, encoding='utf-8')
    return str(path_obj)


def parse_checkpoint(text: str) -> Tuple[Model, CheckpointFile]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise CheckpointError(f"Checkpoint is not valid JSON (truncated?): {e}") from e
    if not isinstance(raw, dict):
        raise CheckpointError("Checkpoint root must be an object")
    if raw.get('version') != CHECKPOINT_VERSION:
        raise SchemaVersionError(
            f"Checkpoint version {raw.get('version')} != supported {CHECKPOINT_VERSION}")
    try:
        data = CheckpointFile.model_validate(raw)
    except ValidationError as e:
        raise CheckpointError(f"Checkpoint schema violation: {e}") from e

    dims = (data.dims.input, data.dims.hidden, data.dims.output)
    if dims != (N_FEATURES, HIDDEN_UNITS, OUTPUT_UNITS):
        raise ShapeMismatchError(f"Checkpoint dims {dims} do not match the network")
    try:
        model = Model(
            W1=data.W1, b1=data.b1, W2=data.W2, b2=data.b2,
            norm=Normalizer.from_dict(data.norm) if data.norm is not None else None,
        )
    except ValueError as e:
        raise ShapeMismatchError(str(e)) from e
    return model, data


def load_checkpoint(path: str) -> Tuple[Model, CheckpointFile]:
    """
    Load a checkpoint.

    Returns:
        The model and the parsed file (``strategy``, ``strategy_state``, ``extra``).

    Raises:
        CheckpointError: unreadable/truncated file or schema violation.
        SchemaVersionError: unsupported version.
        ShapeMismatchError: parameter shapes disagree with the network.
    """
    path_obj = Path(path)
    if not path_obj.exists():
        raise CheckpointError(f"Checkpoint not found at: {path}")
    return parse_checkpoint(path_obj.read_text(encoding='utf-8'))
