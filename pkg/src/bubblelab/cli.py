"""Command line interface.

Subcommands:
    run      execute a preset experiment and write its artifact files
    analyze  re-run bubble analysis on a stored field file
    minmax   shorthand for run --preset geodesic-sweepout

Exit codes: 0 success, 1 hard error (bad config or arguments),
2 stage failure with partial results written.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import ConfigError, apply_overrides, load_config
from .presets import PRESETS, build_preset
from .runner import run_analysis, run_experiment


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bubblelab",
                                description="energy concentration laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset experiment")
    run.add_argument("--preset", choices=sorted(PRESETS), default=None)
    run.add_argument("--config", default=None, help="key = value config file")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--seed", type=int, default=None)

    an = sub.add_parser("analyze", help="re-run bubble analysis on a field file")
    an.add_argument("--field", required=True)
    an.add_argument("--config", default=None)
    an.add_argument("--out", default="out")
    an.add_argument("--preset", choices=sorted(PRESETS), default=None)
    an.add_argument("--seed", type=int, default=None)

    mm = sub.add_parser("minmax", help="run the geodesic sweepout experiment")
    mm.add_argument("--config", default=None)
    mm.add_argument("--out", default="out")
    mm.add_argument("--seed", type=int, default=None)
    return p


def _resolve_config(args, default_preset: str | None = None):
    overrides = {}
    if args.config is not None:
        overrides = load_config(args.config)
    preset = getattr(args, "preset", None) or overrides.get("preset") \
        or default_preset or "constant-sanity"
    cfg = build_preset(preset)
    overrides.pop("preset", None)
    cfg = apply_overrides(cfg, overrides)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = _resolve_config(args)
            return run_experiment(cfg, args.out)
        if args.command == "analyze":
            cfg = _resolve_config(args)
            return run_analysis(args.field, cfg, args.out)
        if args.command == "minmax":
            cfg = _resolve_config(args, default_preset="geodesic-sweepout")
            return run_experiment(cfg, args.out)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except (KeyError, ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
