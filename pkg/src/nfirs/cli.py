"""Command-line entry point: ``nfirs snr-sweep`` and ``nfirs distance-sweep``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigParseError, ScenarioConfig, parse_config
from .experiments import SCHEMES, emit_results, run_distance_sweep, run_snr_sweep

DEFAULT_SNR_GRID = "0,10,20,30,40"
DEFAULT_DISTANCES = "3,10,20,40,60,90"


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _scheme_list(text: str) -> list[str]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    unknown = [n for n in names if n not in SCHEMES]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown scheme(s) {unknown}; choose from {','.join(SCHEMES)}")
    return names


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfirs",
        description="Monte-Carlo WSR sweeps for a full-duplex mmWave link with near-field IRSs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per sweep")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value scenario file (defaults fill the rest)")
        p.add_argument("--out", required=True, help="CSV output path")
        p.add_argument("--trials", type=_positive_int, help="trials per point")
        p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
        p.add_argument("--workers", type=_positive_int, default=1,
                       help="worker processes (output is identical for any count)")

    snr = sub.add_parser("snr-sweep", help="average WSR versus SNR")
    common(snr)
    snr.add_argument("--schemes", type=_scheme_list, default=list(SCHEMES),
                     help="comma-separated subset of " + ",".join(SCHEMES))
    snr.add_argument("--snr-grid", type=_float_list, default=_float_list(DEFAULT_SNR_GRID),
                     help=f"SNR points in dB (default {DEFAULT_SNR_GRID})")

    dist = sub.add_parser("distance-sweep", help="average WSR versus IRS standoff")
    common(dist)
    dist.add_argument("--schemes", type=_scheme_list,
                      default=["fd_irs_10", "fd_irs_20", "fd_irs_30"],
                      help="comma-separated subset of " + ",".join(SCHEMES))
    dist.add_argument("--distances", type=_float_list,
                      default=_float_list(DEFAULT_DISTANCES),
                      help=f"standoff distances in m (default {DEFAULT_DISTANCES})")
    dist.add_argument("--snr-db", type=float, default=30.0, help="SNR in dB (default 30)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        config = parse_config(args.config) if args.config else ScenarioConfig()
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ValueError("--seed must be an unsigned 64-bit integer")
            config = config.replace(master_seed=args.seed)
        if args.trials is not None:
            config = config.replace(n_trials=args.trials)
        if args.command == "snr-sweep":
            rows = run_snr_sweep(config, args.snr_grid, args.schemes, workers=args.workers)
        else:
            rows = run_distance_sweep(config, args.distances, args.schemes,
                                      snr_db=args.snr_db, workers=args.workers)
        emit_results(rows, args.out)
    except (ConfigParseError, ValueError, OSError, RuntimeError) as exc:
        print(f"nfirs: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
