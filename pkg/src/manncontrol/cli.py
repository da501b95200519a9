#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line entry point.

    manncontrol run      [config] [--mode nn|mann|mann-frozen] [--out DIR] [--seed N]
    manncontrol compare  [config] [--out DIR] [--seed N] [--jobs N]
    manncontrol validate [config]

The config defaults to the shipped example1_scenario1.json. Exit codes:
0 success, 1 config or assumption error, 2 divergence.
Log verbosity comes from the MANNCONTROL_LOG_LEVEL environment variable.
"""

import os
import sys
import argparse
import logging
import functools
from concurrent.futures import ProcessPoolExecutor
from .plant import validate_assumption
from .controller import Mode
from .simulator import simulate
from .metrics import event_metrics, comparison_table, format_table
from .helper_mods.config_helpers import load_config, parse_config, build_run
from .helper_mods.io_helpers import (ensure_dir, write_trajectory_csv, write_table_csv,
                                     write_text)
from .helper_mods.errors import ConfigError, DivergenceError, NumericError

logging.basicConfig(level=logging.INFO, format='%(message)s')

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGED = 2

COMPARE_MODES = (Mode.NN.value, Mode.MANN.value, Mode.MANN_FROZEN.value)


def check_assumption(exp):
    """Sample the gain assumption when the config asks for it; raise ConfigError on a violation."""
    val = exp.validation
    if not val.get("enabled", True):
        return None
    report = validate_assumption(exp.system, val["box"], int(val["samples"]), int(val["seed"]))
    if not report.passed:
        raise ConfigError(report.message)
    return report


def run_experiment(exp, mode=None, seed=None, progress=False):
    """
    Simulate one mode of an experiment and compute its per-change metrics.

    Return
    --------
    (Trajectory, pandas.DataFrame of event metrics)
    """
    run = build_run(exp, mode=mode, seed=seed, progress=progress)
    traj = simulate(run)
    metrics = event_metrics(traj, traj.events, exp.metrics)
    return traj, metrics


def _run_mode(raw, source, mode, seed, progress):
    """Worker for compare: rebuild the experiment from its merged config and simulate one mode."""
    exp = parse_config(raw, source=source)
    traj, _ = run_experiment(exp, mode=mode, seed=seed, progress=progress)
    return traj


def compare_modes(exp, seed=None, jobs=len(COMPARE_MODES), progress=False):
    """
    Simulate every comparison mode of an experiment.

    With jobs > 1 the modes run in separate processes; each one rebuilds the
    experiment from exp.raw because the plant functions are closures.

    Return
    --------
    dict mode -> Trajectory, in COMPARE_MODES order
    """
    if jobs <= 1:
        return {mode: run_experiment(exp, mode=mode, seed=seed, progress=progress)[0]
                for mode in COMPARE_MODES}
    with ProcessPoolExecutor(max_workers=min(jobs, len(COMPARE_MODES))) as pool:
        futures = {mode: pool.submit(_run_mode, exp.raw, exp.source, mode, seed, progress) for mode in COMPARE_MODES}
        return {mode: fut.result() for mode, fut in futures.items()}


def _guarded(func):
    """Map errors to exit codes, logging the message."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (DivergenceError, NumericError) as err:
            logging.error(str(err))
            return EXIT_DIVERGED
        except (ValueError, OSError) as err:
            logging.error(str(err))
            return EXIT_CONFIG
    return wrapper


@_guarded
def cmd_run(config_path=None, mode=None, out="mann_output", seed=None, progress=False):
    """
    Simulate one controller mode and write trajectory.csv and metrics.csv to `out`.
    """
    exp = load_config(config_path)
    check_assumption(exp)
    traj, metrics = run_experiment(exp, mode=mode, seed=seed, progress=progress)
    ensure_dir(out)
    write_trajectory_csv(traj, os.path.join(out, "trajectory.csv"))
    write_table_csv(metrics, os.path.join(out, "metrics.csv"), index=False)
    return EXIT_OK


@_guarded
def cmd_compare(config_path=None, out="mann_compare", seed=None, progress=False, jobs=len(COMPARE_MODES)):
    """
    Run the NN, MANN and MANN-frozen controllers with identical settings and seed
    (in parallel unless jobs is 1),
    write one trajectory per mode plus comparison.csv and summary.txt, and print the summary.
    """
    exp = load_config(config_path)
    check_assumption(exp)
    trajs = compare_modes(exp, seed=seed, jobs=jobs, progress=progress)

    events = trajs[Mode.NN.value].events
    if not events:
        raise ConfigError("The scenario has no changes after t = 0 within the horizon; nothing to compare.")
    table = comparison_table(trajs, events, exp.metrics, baseline=Mode.NN.value)

    ensure_dir(out)
    for mode, traj in trajs.items():
        write_trajectory_csv(traj, os.path.join(out, f"trajectory_{mode}.csv"))
    write_table_csv(table, os.path.join(out, "comparison.csv"))
    summary = (f"Time to settle within {exp.metrics.band_fraction * 100:g}% error "
               f"({exp.metrics.band_mode} band), {exp.system.name} / {exp.script.name}\n"
               + format_table(table))
    write_text(summary, os.path.join(out, "summary.txt"))
    print(summary)
    return EXIT_OK


@_guarded
def cmd_validate(config_path=None):
    """Check the config schema and sample the gain assumption."""
    exp = load_config(config_path)
    exp.validation["enabled"] = True
    check_assumption(exp)
    logging.info(f"{exp.source} is a valid experiment config.")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="manncontrol",
        description="Backstepping memory-augmented neural-network adaptive control simulations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one controller mode")
    p_run.add_argument("config", nargs="?", default=None, help="JSON experiment config")
    p_run.add_argument("--mode", choices=COMPARE_MODES, default=None)
    p_run.add_argument("--out", default="mann_output")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--progress", action="store_true")

    p_cmp = sub.add_parser("compare", help="compare NN, MANN and MANN-frozen controllers")
    p_cmp.add_argument("config", nargs="?", default=None, help="JSON experiment config")
    p_cmp.add_argument("--out", default="mann_compare")
    p_cmp.add_argument("--seed", type=int, default=None)
    p_cmp.add_argument("--progress", action="store_true")
    p_cmp.add_argument("--jobs", type=int, default=len(COMPARE_MODES),
                       help="worker processes (1 runs the modes one after another)")

    p_val = sub.add_parser("validate", help="check a config and the gain assumption")
    p_val.add_argument("config", nargs="?", default=None, help="JSON experiment config")
    return parser


def main(argv=None):
    level = os.environ.get("MANNCONTROL_LOG_LEVEL", "INFO").upper()
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))

    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, mode=args.mode, out=args.out, seed=args.seed, progress=args.progress)
    if args.command == "compare":
        return cmd_compare(args.config, out=args.out, seed=args.seed, progress=args.progress,
                           jobs=args.jobs)
    return cmd_validate(args.config)


if __name__ == "__main__":
    sys.exit(main())
