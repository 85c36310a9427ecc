"""Command-line interface.

Usage: kernelcurves <subcommand> --config run.yaml [--seed N] [--output-dir D]

Subcommands: predict-curve, empirical-curve, check-hea, decompose-target,
failure-modes, gen-data. Exit codes: 0 success, 2 config error, 3 numerical
failure.
"""

import argparse
import sys

import numpy as np

from . import pipeline
from .eigenframework import RidgelessError
from .pipeline import ConfigError

COMMANDS = {
    "predict-curve": pipeline.cmd_predict_curve,
    "empirical-curve": pipeline.cmd_empirical_curve,
    "check-hea": pipeline.cmd_check_hea,
    "decompose-target": pipeline.cmd_decompose_target,
    "failure-modes": pipeline.cmd_failure_modes,
    "gen-data": pipeline.cmd_gen_data,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kernelcurves",
        description="Predict and validate kernel ridge regression learning "
        "curves from covariance statistics and Hermite decompositions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="YAML run config")
        cmd.add_argument("--seed", type=int, default=None, help="override config seed")
        cmd.add_argument("--output-dir", default=None, help="override output directory")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = pipeline.load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.output_dir is not None:
            cfg["output_dir"] = args.output_dir
        out = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RidgelessError, RuntimeError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return 3
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
