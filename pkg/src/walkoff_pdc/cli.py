"""Command line entry point.

    walkoff-pdc run CONFIG [--out DIR] [--threads N] [--preset NAME]
    walkoff-pdc run --preset NAME [--out DIR]
    walkoff-pdc presets
    walkoff-pdc version

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .scenario import ConfigError, list_presets, load_config, parse_config, preset_config, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkoff-pdc", description="Two-photon amplitude of type-I PDC with walk-off.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a YAML config and/or a preset")
    run.add_argument("config", nargs="?", help="YAML scenario file (keys override the preset)")
    run.add_argument("--out", help="output directory (overrides output.directory)")
    run.add_argument("--threads", type=int, default=1, help="worker threads; does not change the outputs")
    run.add_argument("--preset", help="start from a bundled preset")

    sub.add_parser("presets", help="list bundled presets")
    sub.add_parser("version", help="print the package version")
    return parser


def _run(args) -> int:
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        base = preset_config(args.preset) if args.preset else None
        if args.config:
            config = load_config(args.config, overrides=base)
        elif base is not None:
            config = parse_config(base)
        else:
            raise ConfigError("run needs a config path or --preset")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        summary = run_scenario(config, out_dir=args.out, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, ValueError, RuntimeError, IndexError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    print(json.dumps({"files": sorted(summary.files.values())}, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    if args.command == "presets":
        for name, desc in list_presets():
            print(f"{name}\t{desc}")
        return EXIT_OK
    print(__version__)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
