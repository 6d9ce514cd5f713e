"""
Configuration Package
====================

Environment-driven defaults and the shipped config files.

Values come from ``.env.local`` (if present) or the process environment;
command-line flags override both.
"""

import os
from pathlib import Path
from typing import Any, Dict

from dotenv import load_dotenv

ENV_FILE = ".env.local"

CONFIG_DIR = Path(__file__).resolve().parent
DEFAULT_TASKS_FILE = CONFIG_DIR / "default_tasks.json"
SIMULATE_EXAMPLE_FILE = CONFIG_DIR / "simulate_example.json"

DEFAULT_OUTPUT_DIR = "output"
DEFAULT_PARALLELISM = 1
DEFAULT_SEED = 0


def load_environment(env_file: str = ENV_FILE) -> bool:
    """Load ``env_file`` into the environment; returns whether it existed."""
    if os.path.exists(env_file):
        load_dotenv(env_file)
        return True
    return False


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got '{raw}'")


def get_defaults() -> Dict[str, Any]:
    """Defaults for the CLI flags, read from the environment."""
    return {
        "output_dir": os.getenv("MOLCOMM_OUTPUT_DIR", DEFAULT_OUTPUT_DIR),
        "parallelism": _env_int("MOLCOMM_PARALLELISM", DEFAULT_PARALLELISM),
        "seed": _env_int("MOLCOMM_SEED", DEFAULT_SEED),
    }


__all__ = [
    "ENV_FILE",
    "CONFIG_DIR",
    "DEFAULT_TASKS_FILE",
    "SIMULATE_EXAMPLE_FILE",
    "DEFAULT_OUTPUT_DIR",
    "DEFAULT_PARALLELISM",
    "DEFAULT_SEED",
    "load_environment",
    "get_defaults",
]
