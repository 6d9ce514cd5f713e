"""
Test Helpers
============

Synthetic task builders and the script-mode runner every test module uses
from its ``main()``.
"""

import inspect
import tempfile
import traceback
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.bench import TaskDataset, TrainingSection
from src.nn import FEATURE_BOUNDS, FEATURE_NAMES

RTT_MAX = 2000.0

FAST_TRAINING = TrainingSection(epochs=60, batch_size=16, learning_rate=0.02,
                                validation_fraction=0.2, rtt_max=RTT_MAX)


def random_features(n: int, rng: np.random.Generator) -> np.ndarray:
    """Raw feature vectors inside the global bounds (diffusive one-hot)."""
    low = np.array([FEATURE_BOUNDS[name][0] for name in FEATURE_NAMES])
    high = np.array([FEATURE_BOUNDS[name][1] for name in FEATURE_NAMES])
    X = rng.uniform(low, high, size=(n, len(FEATURE_NAMES)))
    X[:, 3:6] = [1.0, 0.0, 0.0]
    return X


def synthetic_task(task_id: str, level: float, n: int = 100, seed: int = 0,
                   noise: float = 0.02, features: Optional[np.ndarray] = None) -> TaskDataset:
    """
    Task whose normalized target is ``level`` plus Gaussian noise; returned in
    RTT units so it goes through the same normalization as simulated data.
    """
    rng = np.random.default_rng(seed)
    X = features if features is not None else random_features(n, rng)
    y = np.clip(level + rng.normal(0.0, noise, size=len(X)), 0.0, 1.0) * RTT_MAX
    return TaskDataset.from_arrays(task_id, X, y, test_fraction=0.2, seed=seed)


def run_module_tests(namespace: Dict[str, Any], title: str) -> bool:
    """Run every ``test_*`` function of a module outside pytest and print a summary."""
    print(f"🧪 {title}")
    print("=" * 60)
    results: Dict[str, bool] = {}
    tests: List[Callable] = [f for name, f in namespace.items()
                             if name.startswith('test_') and callable(f)]
    for test in tests:
        params = inspect.signature(test).parameters
        if set(params) - {'tmp_path'}:
            print(f"  ⏭️  {test.__name__} (needs pytest fixtures)")
            continue
        try:
            if 'tmp_path' in params:
                with tempfile.TemporaryDirectory() as tmp:
                    test(tmp_path=Path(tmp))
            else:
                test()
            results[test.__name__] = True
            print(f"  ✅ {test.__name__}")
        except Exception:
            results[test.__name__] = False
            print(f"  ❌ {test.__name__}")
            traceback.print_exc()

    passed = sum(results.values())
    total = len(results)
    print(f"\n📊 Summary: {passed}/{total} tests passed")
    return passed == total
