"""Command line entry point: ``softfec sweep | gain | validate``."""
from __future__ import annotations

import argparse
import logging
import sys

from .harness import ConfigError, ExperimentConfig, measure_gain, read_table, run_sweep

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CENSORED = 3
EXIT_IO = 4


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softfec", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a BER sweep from a config file")
    sweep.add_argument("config", help="YAML file of key: value settings")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--ebn0", type=_floats, help="override sweep, e.g. '3.4,3.5,3.6'")
    sweep.add_argument("--out", default=".", help="output directory")
    sweep.add_argument("--name", default="ber", help="output file stem")
    sweep.add_argument("--min-errors", type=int)
    sweep.add_argument("--max-bits", type=float)
    sweep.add_argument("--full-stopping", action="store_true",
                       help="collect at least 1e5 bit errors per point")

    gain = sub.add_parser("gain", help="Eb/N0 gain of table A over table B")
    gain.add_argument("table_a")
    gain.add_argument("table_b")
    gain.add_argument("--ber", type=float, default=1e-4, help="target BER")

    sub.add_parser("validate", help="run the fast oracle and invariant checks")
    return parser


def _sweep(args) -> int:
    overrides = {
        "seed": args.seed,
        "workers": args.workers,
        "ebn0": args.ebn0,
        "min_errors": 10**5 if args.full_stopping else args.min_errors,
        "max_bits": args.max_bits,
    }
    try:
        config = ExperimentConfig.load(args.config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        records = run_sweep(config, args.out, args.name)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in records:
        flag = "  censored" if r.censored else ""
        print(f"{r.ebn0_db:.3f} dB  {r.bit_errors}/{r.bits_counted}  BER {r.ber:.3e}{flag}")
    if all(r.censored for r in records):
        return EXIT_CENSORED
    return EXIT_OK


def _gain(args) -> int:
    try:
        a, b = read_table(args.table_a), read_table(args.table_b)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        g = measure_gain(a, b, args.ber)
    except ValueError as exc:
        print(f"cannot measure gain: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{g:+.4f} dB at BER {args.ber:g}")
    return EXIT_OK


def _validate(args) -> int:
    from .validation import run_quick_checks

    results = run_quick_checks()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    handler = {"sweep": _sweep, "gain": _gain, "validate": _validate}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
