"""
CLI Package
===========

Command implementations behind ``main.py``, exit codes and the run manifest.
"""

from .manifest import MANIFEST_FILE, RunManifest, canonical_json, config_hash
from .commands import (
    EXIT_CONFIG_ERROR,
    EXIT_DATA_ERROR,
    EXIT_INVALID_SAMPLE,
    EXIT_OK,
    cmd_dataset,
    cmd_indirect,
    cmd_report,
    cmd_simulate,
    cmd_train,
    exit_code_for,
    run_rows,
)

__all__ = [
    'MANIFEST_FILE', 'RunManifest', 'canonical_json', 'config_hash',
    'EXIT_CONFIG_ERROR', 'EXIT_DATA_ERROR', 'EXIT_INVALID_SAMPLE', 'EXIT_OK',
    'cmd_dataset', 'cmd_indirect', 'cmd_report', 'cmd_simulate', 'cmd_train',
    'exit_code_for', 'run_rows',
]
