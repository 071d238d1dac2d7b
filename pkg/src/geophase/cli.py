"""Command line: ``geophase {run,validate,sweep} CONFIG``.

Exit codes: 0 success, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

import yaml

from . import __version__
from .config import ExperimentConfig, load, validate
from .errors import ConfigInvalid, GeophaseError
from .runner import run, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with 2 on usage errors, matching the config error code
    parser = argparse.ArgumentParser(prog="geophase", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"geophase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_overrides(p):
        p.add_argument("config", help="YAML experiment config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--output", help="override output_path ('-' for stdout)")
        p.add_argument("--analytic", action="store_true", help="no noise, no sampling")
        return p

    with_overrides(sub.add_parser("run", help="run one experiment"))
    v = sub.add_parser("validate", help="check a config and list problems")
    v.add_argument("config")
    s = with_overrides(sub.add_parser("sweep", help="rerun with one parameter varied"))
    s.add_argument("--param", required=True, help="scenario parameter to vary")
    s.add_argument("--values", required=True,
                   help="comma-separated values, each read as YAML (e.g. '0.1,0.5' or '30 deg,45 deg')")
    return parser


def _parse_values(text: str) -> list:
    return [yaml.safe_load(item) for item in text.split(",") if item.strip()]


def _apply_overrides(raw: dict, args) -> dict:
    raw = dict(raw)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.output is not None:
        raw["output_path"] = args.output
    if args.analytic:
        raw["analytic_mode"] = True
    return raw


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load(args.config)
        if args.command == "validate":
            diags = validate(raw)
            for d in diags:
                print(d, file=sys.stderr)
            if diags:
                return EXIT_CONFIG
            print("ok")
            return EXIT_OK
        raw = _apply_overrides(raw, args)
        to_stdout = raw.get("output_path") == "-"
        if to_stdout:
            raw.pop("output_path")
        cfg = ExperimentConfig.from_mapping(raw)
        if args.command == "run":
            table = run(cfg)
        else:
            values = _parse_values(args.values)
            if not values:
                raise ConfigInvalid("--values: no values given")
            table = sweep(cfg, args.param, values)
        if to_stdout or cfg.output_path is None:
            sys.stdout.write(table.to_text())
        return EXIT_OK
    except ConfigInvalid as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeophaseError, ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
