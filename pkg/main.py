"""
Molecular Communication RTT Estimation - Main Execution Script
==============================================================

Command-line entry point:

    python main.py simulate --config config/simulate_example.json --out output/sim
    python main.py dataset  --config config/default_tasks.json --out output/data
    python main.py train    --config config/default_tasks.json --data output/data \
                            --strategy ewc --seed 1 --out output/ewc_1
    python main.py indirect --config config/default_tasks.json --data output/data --out output/ind
    python main.py report   --runs output/ewc_1 output/baseline_1 --out output/report
"""

import argparse
import os
import sys
from typing import List, Optional

# Add src to path for imports
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import DEFAULT_TASKS_FILE, SIMULATE_EXAMPLE_FILE, get_defaults, load_environment
from src.cl import STRATEGIES
from src.cli import (
    EXIT_OK,
    cmd_dataset,
    cmd_indirect,
    cmd_report,
    cmd_simulate,
    cmd_train,
    exit_code_for,
)
from src.utils import console, set_verbose


def setup_environment() -> dict:
    """Load .env.local and return the flag defaults it implies."""
    loaded = load_environment()
    defaults = get_defaults()
    if loaded:
        console.success("Loaded environment variables from .env.local")
    return defaults


def build_parser(defaults: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="SW-ARQ molecular communication simulator and continual-learning RTT estimation")
    parser.add_argument("--verbose", "-v", action="store_true", help="Show progress and status lines")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=defaults["seed"],
                        help="Root seed every random stream is derived from")
    common.add_argument("--out", default=None, help="Output directory")

    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="Run one simulation ensemble")
    simulate.add_argument("--config", default=str(SIMULATE_EXAMPLE_FILE), help="Simulate config JSON")
    simulate.add_argument("--parallelism", type=int, default=defaults["parallelism"],
                          help="Worker processes for the ensemble")

    dataset = sub.add_parser("dataset", parents=[common], help="Generate per-task datasets")
    dataset.add_argument("--config", default=str(DEFAULT_TASKS_FILE), help="Task-sequence JSON")
    dataset.add_argument("--parallelism", type=int, default=defaults["parallelism"],
                         help="Worker processes across grid points")
    dataset.add_argument("--runs-per-point", type=int, default=None,
                         help="Override runs_per_point of every task")

    for name, help_text in (("train", "Run a scenario suite for one strategy"),
                            ("indirect", "Measure indirect learning")):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("--config", default=str(DEFAULT_TASKS_FILE), help="Task-sequence JSON")
        cmd.add_argument("--data", required=True, help="Directory with the task CSV datasets")
        cmd.add_argument("--strategy", choices=sorted(STRATEGIES), default="baseline",
                         help="Continual-learning strategy")
        if name == "train":
            cmd.add_argument("--resume", action="store_true",
                             help="Continue from the last checkpoint in --out")

    report = sub.add_parser("report", parents=[common], help="Summarize runs across strategies and seeds")
    report.add_argument("--runs", nargs="+", required=True, help="Run directories (train or indirect)")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    defaults = setup_environment()
    args = build_parser(defaults).parse_args(argv)
    set_verbose(args.verbose)
    out = args.out or os.path.join(defaults["output_dir"], args.command)

    console.rule()
    console.step(f"Command: {args.command} (seed {args.seed}) -> {out}")
    try:
        if args.command == "simulate":
            manifest = cmd_simulate(args.config, out, seed=args.seed, parallelism=args.parallelism)
        elif args.command == "dataset":
            manifest = cmd_dataset(args.config, out, seed=args.seed, parallelism=args.parallelism,
                                   runs_per_point=args.runs_per_point)
        elif args.command == "train":
            manifest = cmd_train(args.config, args.data, out, strategy=args.strategy,
                                 seed=args.seed, resume=args.resume)
        elif args.command == "indirect":
            manifest = cmd_indirect(args.config, args.data, out, strategy=args.strategy, seed=args.seed)
        else:
            manifest = cmd_report(args.runs, out)
    except Exception as e:
        code = exit_code_for(e)
        if code == 1:
            raise
        console.error(f"{type(e).__name__}: {e}")
        return code

    console.success(f"{len(manifest.artifacts)} artifact(s) written, manifest in {out}")
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
