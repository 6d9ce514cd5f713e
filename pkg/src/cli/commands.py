"""
CLI Commands Module
===================

The commands behind ``main.py``. Each ``cmd_*`` function writes its data
artifacts plus ``manifest.json`` into the output directory and returns the
manifest; errors propagate and are mapped to exit codes by ``exit_code_for``.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..arq import InvalidSample, run_ensemble
from ..bench import (
    ConfigError,
    EvalMatrix,
    MissingDatasetError,
    ZeroDiagonalError,
    forgetting_curve,
    forgetting_ratio,
    generate_dataset,
    increase_rate,
    indirect_learning,
    load_datasets,
    load_sequence_file,
    load_simulate_config,
    metrics_summary,
    plasticity,
    run_scenario_suite,
    stability,
)
from ..cl import STRATEGIES
from ..nn import CheckpointError, EmptyDataset, FeatureRangeError, TrainingDiverged
from ..simcore import PlacementFailure, SettingsError
from ..utils.console import console
from .manifest import RunManifest

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_INVALID_SAMPLE = 4

MATRIX_FILE = 'matrix.json'
METRICS_FILE = 'metrics.json'
TIMINGS_FILE = 'timings.json'
INDIRECT_FILE = 'indirect.json'
FLOAT_FORMAT = '%.17g'


def exit_code_for(error: BaseException) -> int:
    """Exit code of the CLI for an error raised by a command."""
    if isinstance(error, InvalidSample):
        return EXIT_INVALID_SAMPLE
    if isinstance(error, (MissingDatasetError, EmptyDataset, CheckpointError, PlacementFailure,
                          FeatureRangeError, ZeroDiagonalError)):
        return EXIT_DATA_ERROR
    if isinstance(error, (ConfigError, SettingsError, TrainingDiverged, ValueError, FileNotFoundError)):
        return EXIT_CONFIG_ERROR
    return 1


def _write_json(out: Path, name: str, payload: Any, manifest: RunManifest) -> str:
    path = out / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding='utf-8')
    manifest.add(name)
    return str(path)


def _write_csv(out: Path, name: str, frame: pd.DataFrame, manifest: RunManifest) -> str:
    path = out / name
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    manifest.add(name)
    return str(path)


def _check_strategy(strategy: str) -> None:
    if strategy not in STRATEGIES:
        raise ConfigError(f"Unknown strategy '{strategy}'. Choose one of: {', '.join(STRATEGIES)}")


# ----------------------------------------------------------------------
# simulate
# ----------------------------------------------------------------------

def cmd_simulate(config: str, out: str, seed: Optional[int] = None,
                 parallelism: int = 1) -> RunManifest:
    """
    Run one ensemble and write ``ensemble.json``, ``ensemble.csv`` and the
    per-run log ``runs.csv``. The statistics are written even when the
    ensemble turns out invalid, then InvalidSample is raised.
    """
    cfg = load_simulate_config(config)
    settings = cfg.sim_settings(seed)
    out_dir = Path(out)
    manifest = RunManifest.begin('simulate', {'config': cfg.model_dump(mode='json'), 'seed': settings.seed},
                                 {'base': settings.seed})

    console.step(f"Simulating {cfg.runs} runs ({settings.transport.value}, d={settings.tx_rx_distance})")
    error: Optional[InvalidSample] = None
    try:
        stats = run_ensemble(settings, cfg.runs, parallelism=parallelism, strict=True)
    except InvalidSample as e:
        stats, error = e.stats, e

    _write_json(out_dir, 'ensemble.json', {'settings': settings.to_dict(), 'stats': stats.to_dict()},
                manifest)
    _write_csv(out_dir, 'ensemble.csv', pd.DataFrame([stats.csv_row(settings)]), manifest)
    _write_csv(out_dir, 'runs.csv', stats.runs_frame(), manifest)
    manifest.save(out)
    if error is not None:
        raise error
    console.success(f"Median RTT {stats.median_rtt:.4g} s, delivery rate {stats.delivery_rate:.2f}")
    return manifest


# ----------------------------------------------------------------------
# dataset
# ----------------------------------------------------------------------

def cmd_dataset(config: str, out: str, seed: int = 0, parallelism: int = 1,
                runs_per_point: Optional[int] = None) -> RunManifest:
    """Generate ``<task>_train.csv`` / ``<task>_test.csv`` for every task of the sequence."""
    file = load_sequence_file(config)
    out_dir = Path(out)
    manifest = RunManifest.begin(
        'dataset',
        {'config': file.model_dump(mode='json'), 'seed': seed, 'runs_per_point': runs_per_point},
        {'base': seed},
    )
    dropped: Dict[str, List[Dict[str, float]]] = {}
    for task in file.tasks:
        dataset = generate_dataset(task, seed=seed, parallelism=parallelism,
                                   runs_per_point=runs_per_point)
        for path in dataset.save(out):
            manifest.add(Path(path).name)
        dropped[task.task_id] = dataset.dropped
    _write_json(out_dir, 'dropped.json', dropped, manifest)
    manifest.save(out)
    console.success(f"Datasets for {len(file.tasks)} tasks written to {out}")
    return manifest


# ----------------------------------------------------------------------
# train
# ----------------------------------------------------------------------

def cmd_train(config: str, data: str, out: str, strategy: str = 'baseline', seed: int = 0,
              resume: bool = False) -> RunManifest:
    """
    Run the scenario suite of one strategy. Writes a checkpoint per task,
    ``matrix.json``, ``metrics.json`` and the wall-clock ``timings.json``.
    """
    _check_strategy(strategy)
    file = load_sequence_file(config)
    sequence = file.sequence()
    datasets = load_datasets(data, sequence.task_ids)
    out_dir = Path(out)
    manifest = RunManifest.begin(
        'train', {'config': file.model_dump(mode='json'), 'strategy': strategy, 'seed': seed},
        {'base': seed},
    )

    result = run_scenario_suite(sequence, datasets, strategy=strategy, hyper=file.hyper(),
                                training=file.training, seed=seed, out_dir=out, resume=resume)

    for path in sorted((out_dir / 'checkpoints').glob('*.json')):
        manifest.add(str(path.relative_to(out_dir)))
    manifest.add('progress.json')
    _write_json(out_dir, MATRIX_FILE, result.matrix_payload(), manifest)
    metrics = metrics_summary(result.matrix)
    metrics.update(strategy=strategy, seed=seed)
    _write_json(out_dir, METRICS_FILE, metrics, manifest)
    _write_json(out_dir, TIMINGS_FILE, result.timing_payload(), manifest)
    manifest.save(out)
    console.success(f"[{strategy}] plasticity {metrics['plasticity']:.6g}, "
                    f"stability {metrics['stability']:.6g}")
    return manifest


# ----------------------------------------------------------------------
# indirect learning
# ----------------------------------------------------------------------

def cmd_indirect(config: str, data: str, out: str, strategy: str = 'baseline',
                 seed: int = 0) -> RunManifest:
    """Measure indirect learning for every prefix/target combination of the config."""
    _check_strategy(strategy)
    file = load_sequence_file(config)
    specs = file.indirect_specs()
    needed = sorted({t for s in specs for t in list(s.prefix) + [s.target]})
    datasets = load_datasets(data, needed)
    manifest = RunManifest.begin(
        'indirect', {'config': file.model_dump(mode='json'), 'strategy': strategy, 'seed': seed},
        {'base': seed},
    )
    results = [
        indirect_learning(spec, datasets, strategy=strategy, hyper=file.hyper(),
                          training=file.training, seed=seed).to_dict()
        for spec in specs
    ]
    _write_json(Path(out), INDIRECT_FILE, {'strategy': strategy, 'seed': seed, 'results': results},
                manifest)
    manifest.save(out)
    return manifest


# ----------------------------------------------------------------------
# report
# ----------------------------------------------------------------------

def _read_json(path: Path) -> Dict[str, Any]:
    return json.loads(path.read_text(encoding='utf-8'))


def run_rows(run_dirs: Sequence[str]) -> pd.DataFrame:
    """One row of metrics per training run directory."""
    rows = []
    for run_dir in run_dirs:
        base = Path(run_dir)
        if not (base / MATRIX_FILE).exists():
            continue
        payload = _read_json(base / MATRIX_FILE)
        matrix = EvalMatrix.from_dict(payload)
        timings = _read_json(base / TIMINGS_FILE) if (base / TIMINGS_FILE).exists() else {}
        task_seconds = [float(s) for s in timings.get('task_seconds', [])]
        rows.append({
            'strategy': payload['strategy'],
            'seed': payload['seed'],
            'run_dir': str(base),
            'tasks': matrix.size,
            'plasticity': plasticity(matrix),
            'stability': stability(matrix),
            'increase_rate': increase_rate(matrix),
            'forgetting_ratio': forgetting_ratio(matrix) if matrix.size >= 2 else 0.0,
            'total_seconds': float(np.sum(task_seconds)) if task_seconds else np.nan,
            'per_task_seconds': float(np.mean(task_seconds)) if task_seconds else np.nan,
            '_curve': forgetting_curve(matrix) if matrix.size >= 2 else {},
        })
    return pd.DataFrame(rows)


def _mean_std(frame: pd.DataFrame, by: List[str], columns: List[str]) -> pd.DataFrame:
    grouped = frame.groupby(by, sort=True)
    out = grouped.size().rename('runs').reset_index()
    for column in columns:
        out[f'{column}_mean'] = grouped[column].mean().to_numpy()
        # population std: a single run reports 0
        out[f'{column}_std'] = grouped[column].std(ddof=0).to_numpy()
    return out


def cmd_report(run_dirs: Sequence[str], out: str) -> RunManifest:
    """
    Summarize training and indirect-learning runs across strategies and seeds:
    mean and std of every metric, training time, the stability-vs-time scatter
    and the forgetting-ratio curve, each as CSV.
    """
    out_dir = Path(out)
    manifest = RunManifest.begin('report', {'runs': sorted(str(d) for d in run_dirs)}, {})
    runs = run_rows(run_dirs)
    if runs.empty and not any((Path(d) / INDIRECT_FILE).exists() for d in run_dirs):
        raise MissingDatasetError("No matrix.json or indirect.json found in the given directories")

    summary: Dict[str, Any] = {}
    if not runs.empty:
        runs = runs.sort_values(['strategy', 'seed']).reset_index(drop=True)
        metric_columns = ['plasticity', 'stability', 'increase_rate', 'forgetting_ratio',
                          'total_seconds', 'per_task_seconds']
        table = _mean_std(runs, ['strategy'], metric_columns)
        _write_csv(out_dir, 'per_run.csv', runs.drop(columns=['_curve']), manifest)
        _write_csv(out_dir, 'summary.csv', table, manifest)
        _write_csv(out_dir, 'stability_vs_time.csv',
                   runs[['strategy', 'seed', 'total_seconds', 'stability']], manifest)

        curve_rows = [{'strategy': r['strategy'], 'seed': r['seed'], 'K': k, 'forgetting_ratio': v}
                      for _, r in runs.iterrows() for k, v in r['_curve'].items()]
        if curve_rows:
            curve = _mean_std(pd.DataFrame(curve_rows), ['strategy', 'K'], ['forgetting_ratio'])
            _write_csv(out_dir, 'forgetting_curve.csv', curve, manifest)
        summary['strategies'] = table.astype(object).to_dict(orient='records')

    indirect_rows = []
    for run_dir in run_dirs:
        path = Path(run_dir) / INDIRECT_FILE
        if path.exists():
            payload = _read_json(path)
            indirect_rows.extend(dict(r, seed=payload['seed']) for r in payload['results'])
    if indirect_rows:
        frame = pd.DataFrame(indirect_rows)
        table = _mean_std(frame, ['strategy', 'label'], ['delta'])
        _write_csv(out_dir, 'indirect.csv', table, manifest)
        summary['indirect'] = table.astype(object).to_dict(orient='records')

    _write_json(out_dir, 'report.json', summary, manifest)
    manifest.save(out)
    console.success(f"Report over {len(runs)} training run(s) written to {out}")
    return manifest
