"""Command-line entry point.

Subcommands:

* ``blindrx sweep``: Monte Carlo SNR sweep of the blind receiver,
  emitting one CSV row per SNR point.
* ``blindrx bench``: the benchmark baselines (perfect CSI, perfect CSI
  with the true hypothesis granted, all-pilot ZF/LMMSE estimators); one
  CSV per baseline, suffixed with the baseline name.
* ``blindrx gamma-trace``: per-hypothesis average syndrome-LLR traces
  for a single frame.

Scenario files are flat key=value text (see harness.parse_scenario_file);
omitting --scenario uses the built-in desk-scale defaults.  The code
asset directory can be overridden with the BLINDRX_CODE_DIR environment
variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .harness import (DEFAULT_SCENARIO, emit_csv, emit_gamma_trace,
                      gamma_trace_records, parse_scenario_file,
                      run_benchmarks, run_scenario)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", metavar="FILE",
                        help="scenario file (key = value lines)")
    parser.add_argument("--seed", type=int, help="override the seed")
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output CSV path")
    parser.add_argument("--mode",
                        choices=["single", "cooperative", "distributed"],
                        help="override the receiver mode")
    parser.add_argument("--trials", type=int,
                        help="override trials per SNR point")
    parser.add_argument("--workers", type=int,
                        help="worker processes (default from scenario)")


def _load_scenario(args) -> "Scenario":
    scenario = (parse_scenario_file(args.scenario) if args.scenario
                else DEFAULT_SCENARIO)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.trials is not None:
        overrides["trials_per_point"] = args.trials
    if args.workers is not None:
        overrides["workers"] = args.workers
    return replace(scenario, **overrides) if overrides else scenario


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blindrx",
        description="Blind-receiver Monte Carlo simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="blind receiver SNR sweep")
    _add_common(p_sweep)

    p_bench = sub.add_parser("bench", help="benchmark baseline sweeps")
    _add_common(p_bench)

    p_trace = sub.add_parser("gamma-trace",
                             help="syndrome-average trace for one frame")
    _add_common(p_trace)
    p_trace.add_argument("--snr", type=float,
                         help="SNR in dB (default: first sweep point)")

    args = parser.parse_args(argv)
    scenario = _load_scenario(args)

    if args.command == "sweep":
        emit_csv(run_scenario(scenario), args.out)
        print(f"wrote {args.out}")
    elif args.command == "bench":
        results = run_benchmarks(scenario)
        stem, ext = os.path.splitext(args.out)
        for name, rows in results.items():
            path = f"{stem}_{name}{ext or '.csv'}"
            emit_csv(rows, path)
            print(f"wrote {path}")
    elif args.command == "gamma-trace":
        records = gamma_trace_records(scenario, snr_db=args.snr)
        emit_gamma_trace(records, args.out)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
