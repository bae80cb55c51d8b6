"""Command-line entry point.

    cohmig run CONFIG [--seed N] [--out DIR]
    cohmig validate CONFIG
    cohmig example-config SCENARIO

Exit codes: 0 success, 2 config error, 3 runtime or convergence error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import config, runner

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load(path):
    try:
        return config.load(path)
    except OSError as err:
        return None, [config.Diagnostic("config", None, f"cannot read {path}: {err.strerror or err}")]


def cmd_validate(args) -> int:
    _, diags = _load(args.config)
    for d in diags:
        print(d, file=sys.stderr)
    if diags:
        return EXIT_CONFIG
    print(f"{args.config}: ok")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg, diags = _load(args.config)
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        if args.seed < 0:
            print("--seed must be non-negative", file=sys.stderr)
            return EXIT_CONFIG
        cfg = replace(cfg, seed=args.seed)
    try:
        outcome = runner.run(cfg, args.out)
    except OSError as err:
        print(f"cannot write output: {err}", file=sys.stderr)
        return EXIT_RUNTIME
    for f in outcome.files:
        print(f)
    if outcome.message:
        print(outcome.message, file=sys.stderr)
    return EXIT_OK if outcome.ok else EXIT_RUNTIME


def cmd_example(args) -> int:
    sys.stdout.write(config.default_config_text(args.scenario))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohmig", description="Coherence migration simulations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the scenario described by a config file")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override [run] seed")
    r.add_argument("--out", help="override [run] output_path")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check a config file without running it")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("example-config", help="print the shipped config for a scenario")
    e.add_argument("scenario", choices=config.SCENARIOS)
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
