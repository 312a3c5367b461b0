"""Command-line front end.

Two subcommands:

  run       simulate one scenario and write trace.csv, curves.csv and
            metrics.json into the output directory
  ablate-z  paired fixed-exploration runs on the constant-demand
            scenario, writing ablation.json

Exit codes: 0 success, 2 bad configuration or arguments (including
unreadable input files), 3 output I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, load_algo_config, load_plant
from .harness import compute_metrics, emit, run, z_ablation
from .plant import default_plant
from .rto import AlgoConfig
from .scenarios import builtin, builtin_names, load_csv


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chillrto",
        description="Safe exploratory compressor-dispatch simulation",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="simulate one scenario")
    pr.add_argument(
        "--scenario",
        required=True,
        help=f"built-in name ({', '.join(builtin_names())}) or a demand CSV path",
    )
    pr.add_argument("--plant", default="default", help="plant JSON path, or 'default'")
    pr.add_argument("--algo", default="default", help="algorithm JSON path, or 'default'")
    pr.add_argument("--seed", type=int, default=0, help="run seed (non-negative integer)")
    pr.add_argument("--out", required=True, help="output directory")
    pr.add_argument("--oracle", action="store_true", help="run the exact-knowledge benchmark")
    pr.add_argument(
        "--trust-region",
        type=float,
        default=None,
        metavar="KW",
        help="cap per-instance setpoint moves at this many kW per machine",
    )

    pa = sub.add_parser("ablate-z", help="paired fixed-z runs on constant demand")
    pa.add_argument("--z", default="0,1000", help="comma-separated exploration weights")
    pa.add_argument("--plant", default="default", help="plant JSON path, or 'default'")
    pa.add_argument("--algo", default="default", help="algorithm JSON path, or 'default'")
    pa.add_argument("--seed", type=int, default=0, help="first seed of 5 consecutive")
    pa.add_argument("--seeds", type=int, default=5, help="number of paired seeds")
    pa.add_argument("--out", required=True, help="output directory")
    return p


def _load_inputs(args):
    specs = default_plant() if args.plant == "default" else load_plant(args.plant)
    algo = AlgoConfig() if args.algo == "default" else load_algo_config(args.algo)
    if args.seed < 0:
        raise ConfigError("<args>", "--seed must be non-negative")
    return specs, algo


def _resolve_scenario(value: str):
    if value in builtin_names():
        return builtin(value)
    try:
        return load_csv(value)
    except OSError as exc:
        raise ConfigError(value, f"cannot read scenario: {exc.strerror}") from exc


def _cmd_run(args) -> int:
    specs, algo = _load_inputs(args)
    if args.trust_region is not None:
        algo = replace(algo, trust_region_kw=args.trust_region)
        algo.validate()
    scenario = _resolve_scenario(args.scenario)
    result = run(scenario, specs, algo, args.seed, oracle=args.oracle)
    if args.oracle:
        metrics = compute_metrics(result)
    else:
        oracle_result = run(scenario, specs, algo, args.seed, oracle=True)
        metrics = compute_metrics(result, oracle_result)
    emit(result, args.out, metrics)
    print(
        f"{scenario.name}: {int(result.trace['t_s'].size)} s simulated, "
        f"violations {metrics['violation_count_s']} s, "
        f"demand rmse {metrics['demand_rmse_kw']:.2f} kW -> {args.out}"
    )
    return 0


def _cmd_ablate(args) -> int:
    specs, algo = _load_inputs(args)
    try:
        z_values = [float(v) for v in args.z.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError("<args>", f"--z must be comma-separated numbers, got {args.z!r}")
    if not z_values:
        raise ConfigError("<args>", "--z must name at least one value")
    if args.seeds < 1:
        raise ConfigError("<args>", "--seeds must be positive")
    seeds = list(range(args.seed, args.seed + args.seeds))
    out = z_ablation(builtin("fixed_z_ablation"), specs, algo, seeds, z_values)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "ablation.json").write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"ablation over z={z_values} seeds={seeds} -> {outdir / 'ablation.json'}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_ablate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
