"""
Neural Network Package
======================

From-scratch 12 -> 20 -> 1 ReLU regression network: feature encoding and
normalization, forward pass, composite-loss backpropagation, mini-batch
training with early stopping and versioned checkpoints.
"""

from .features import (
    DEFAULT_RTT_MAX,
    FEATURE_BOUNDS,
    FEATURE_NAMES,
    N_FEATURES,
    TARGET_NAME,
    FeatureRangeError,
    Normalizer,
    encode_features,
)
from .model import HIDDEN_UNITS, PARAM_COUNT, PARAM_ORDER, PARAM_SHAPES, Model, forward, forward_batch, predict
from .backprop import (
    Gradients,
    LossTerm,
    TermList,
    OutputTerm,
    PenaltyTerm,
    apply_gradients,
    backward,
    loss_value,
    mse_loss,
    per_sample_gradients,
)
from .training import (
    Dataset,
    EmptyDataset,
    TrainConfig,
    TrainHistory,
    TrainingDiverged,
    evaluate_mse,
    train_task,
)
from .checkpoint import (
    CHECKPOINT_VERSION,
    CheckpointError,
    CheckpointFile,
    SchemaVersionError,
    ShapeMismatchError,
    load_checkpoint,
    parse_checkpoint,
    save_checkpoint,
)

__all__ = [
    'DEFAULT_RTT_MAX', 'FEATURE_BOUNDS', 'FEATURE_NAMES', 'N_FEATURES', 'TARGET_NAME',
    'FeatureRangeError', 'Normalizer', 'encode_features',
    'HIDDEN_UNITS', 'PARAM_COUNT', 'PARAM_ORDER', 'PARAM_SHAPES', 'Model', 'forward',
    'forward_batch', 'predict',
    'Gradients', 'LossTerm', 'TermList', 'OutputTerm', 'PenaltyTerm', 'apply_gradients', 'backward',
    'loss_value', 'mse_loss', 'per_sample_gradients',
    'Dataset', 'EmptyDataset', 'TrainConfig', 'TrainHistory', 'TrainingDiverged', 'evaluate_mse',
    'train_task',
    'CHECKPOINT_VERSION', 'CheckpointError', 'CheckpointFile', 'SchemaVersionError',
    'ShapeMismatchError', 'load_checkpoint', 'parse_checkpoint', 'save_checkpoint',
]
