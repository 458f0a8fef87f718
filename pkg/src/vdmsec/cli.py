"""Command-line entry point: ``vdmsec <subcommand> [options]``.

Exit codes: 0 success, 1 configuration error, 2 property violation
(leakage, rank or KKT certificate), 3 numerical failure.
"""

import argparse
import logging
import sys

import numpy as np

from . import harness
from .errors import ConfigError, PropertyViolation, VdmError

EXIT_OK, EXIT_CONFIG, EXIT_PROPERTY, EXIT_NUMERICAL = 0, 1, 2, 3

DEFAULT_PRESETS = {
    "secrecy-rate": "fig8-analog",
    "rate-region": "region-analog",
    "dof-scan": "kuser-analog",
    "kuser": "kuser-analog",
    "two-user": "two-user-analog",
    "baseline": "fig7-analog",
}


def _parser():
    p = argparse.ArgumentParser(prog="vdmsec", description="Vandermonde null-space precoding experiments")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings for failing rows")
    sub = p.add_subparsers(dest="command", required=True)
    for name, default in DEFAULT_PRESETS.items():
        s = sub.add_parser(name, help=f"default preset: {default}")
        s.add_argument("--config", help="JSON config with ExperimentConfig field names")
        s.add_argument("--preset", help=f"preset name (default {default})")
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--out", help="CSV output path (default: stdout)")
        s.add_argument("--workers", type=int)
        if name == "dof-scan":
            s.add_argument("--tuples", type=int, default=5, help="number of region tuples to check")
            s.add_argument("--variant", choices=("kuser", "two-user"))
    return p


def _config(args):
    overrides = dict(seed=args.seed, trials=args.trials, output=args.out, workers=args.workers)
    if args.config:
        if args.preset:
            overrides["preset"] = args.preset
        return harness.load_config(args.config, **overrides)
    name = args.preset or DEFAULT_PRESETS[args.command]
    return harness.preset(name, **{k: v for k, v in overrides.items() if v is not None})


def _run(args):
    cfg = _config(args)
    if args.command == "rate-region":
        table = harness.sweep_region(cfg)
    elif args.command == "dof-scan":
        table = harness.dof_scan(cfg, n_tuples=args.tuples, variant=args.variant)
    else:
        table = harness.run_experiment(cfg)
    if not cfg.output:
        sys.stdout.write(table.to_csv())
    if args.command == "dof-scan":
        return EXIT_OK
    harness.check_table(table)
    if table.errors():
        print(f"{len(table.errors())} rows failed numerically", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PropertyViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (VdmError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
