"""Command-line experiment runner: ``ddchan run | list | inspect``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .scenarios import (
    ExperimentConfig,
    get_preset,
    list_scenarios,
    load_channel,
    run_scenario,
)

_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def load_config(path: str) -> ExperimentConfig:
    """Read a TOML config whose keys mirror ExperimentConfig field names."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SystemExit(f"error: {path}: {exc}")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise SystemExit(f"error: {path}: unknown config fields: {', '.join(sorted(unknown))}")
    if "scenario" not in doc:
        raise SystemExit(f"error: {path}: missing required field 'scenario'")
    try:
        return ExperimentConfig(**doc)
    except (TypeError, ValueError) as exc:
        raise SystemExit(f"error: {path}: {exc}")


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trials is not None:
        cfg.trials = args.trials
    if args.snr is not None:
        cfg.snr_db = tuple(float(s) for s in args.snr.split(","))
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out is not None:
        cfg.out = args.out
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ddchan",
        description="Doubly-dispersive channel estimation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or a TOML config")
    run_p.add_argument("--scenario", help="preset id (see `ddchan list`)")
    run_p.add_argument("--config", help="path to a TOML config file")
    run_p.add_argument("--seed", type=int, help="master RNG seed")
    run_p.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
    run_p.add_argument("--snr", help="comma-separated SNR list in dB (inf allowed)")
    run_p.add_argument("--out", help="output root directory (default ./results)")
    run_p.add_argument("--full", action="store_true", help="paper-scale operating points")
    run_p.add_argument("--threads", type=int, help="worker threads for trials")

    sub.add_parser("list", help="list the scenario presets")

    ins_p = sub.add_parser("inspect", help="show a resolved config or a channel file")
    ins_p.add_argument("--scenario", help="preset id to resolve")
    ins_p.add_argument("--channel", help="channel JSON file to validate and summarize")
    ins_p.add_argument("--full", action="store_true")

    args = parser.parse_args(argv)

    if args.command == "list":
        for name, desc in list_scenarios():
            print(f"{name:22s} {desc}")
        return 0

    if args.command == "inspect":
        if args.channel:
            ch = load_channel(args.channel)
            print(
                json.dumps(
                    {
                        "paths": len(ch.paths),
                        "delay_spread_s": ch.delay_spread,
                        "doppler_spread_hz": ch.doppler_spread,
                        "spread_product": ch.delay_spread * ch.doppler_spread,
                        "total_power": float(sum(abs(p.gain) ** 2 for p in ch.paths)),
                        "seed": ch.seed,
                    },
                    indent=2,
                )
            )
            return 0
        if args.scenario:
            cfg = get_preset(args.scenario, full=args.full)
            print(json.dumps(dataclasses.asdict(cfg), indent=2))
            return 0
        raise SystemExit("error: inspect needs --scenario or --channel")

    # run
    if bool(args.scenario) == bool(args.config):
        raise SystemExit("error: pass exactly one of --scenario or --config")
    try:
        if args.config:
            cfg = load_config(args.config)
            if args.full:
                cfg.full = True
        else:
            cfg = get_preset(args.scenario, full=args.full)
        cfg = _apply_overrides(cfg, args)
        report = run_scenario(cfg)
    except ValueError as exc:
        raise SystemExit(f"error: {exc}")
    out_dir = report.write(Path(cfg.out or "results"))
    print(f"wrote {out_dir}/results.csv ({len(report.rows)} rows, {report.wall_clock_s:.2f}s)")
    for key, val in report.aggregates.items():
        print(f"  {key}: {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
