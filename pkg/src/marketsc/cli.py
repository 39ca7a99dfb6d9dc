"""Command line: ``marketsc {price,simulate,train,eval,sweep,synth} [--config PATH] [--seed N] [--out DIR]``.

Exit codes: 0 success, 2 bad input (files, configs, arguments), 1 anything else.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .errors import InputError
from .experiment import COMMANDS, ExperimentConfig, run_experiment

HELP = {
    "price": "exact and smoothed market price of a dataset's demand (or a demand scenario)",
    "simulate": "apply best responses at a price and write post-market features",
    "train": "train naive, strat and market-aware models over seeded splits",
    "eval": "short- and long-term metrics of a given classifier",
    "sweep": "the train pipeline for every budget exponent in 'alphas'",
    "synth": "generate a synthetic scenario and write it as CSV",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="marketsc", description="Strategic classification under market prices.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name])
        sp.add_argument("--config", metavar="PATH", help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", metavar="DIR", help="override the output directory")
    return p


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig(command=args.command)
    cfg = replace(cfg, command=args.command)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        paths = run_experiment(load_config(args))
    except (InputError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"marketsc: input error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"marketsc: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
