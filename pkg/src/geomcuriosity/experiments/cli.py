"""Command-line entry point.

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 numerical
abort.
"""

import argparse
import logging
import sys

from ..exceptions import ConfigError, NumericalError
from .checks import run_check_suite, run_oracle_suite
from .config import GEOMETRY_CHOICES, ExperimentConfig
from .sims import run_sim1, run_sim2

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

logger = logging.getLogger("geomcuriosity")


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geomcuriosity",
        description="Curiosity-driven exploration with Euclidean or projective internal models.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sim1": "explore towards a fixed object",
        "sim2": "first-step move values over a grid of object positions",
        "oracle": "run the oracle check suite",
        "check": "run the invariant check suite",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=_seed, help="master seed (overrides seed)")
        p.add_argument("--geometry", choices=GEOMETRY_CHOICES, help="geometry kind(s) to run")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def load_config(args):
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    try:
        return config.override(seed=args.seed, geometry=args.geometry, output_dir=args.out)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _report(checks):
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


def _sim1(config):
    for tag, traj in run_sim1(config).items():
        pos = traj.positions
        print(f"{tag}: {len(traj.steps)} steps, final position {pos[-1].tolist()}")
    return EXIT_OK


def _sim2(config):
    for tag, res in run_sim2(config).items():
        means = ", ".join(f"{m:.4f}" for m in res.mean)
        print(f"{tag}: {len(res.positions)} positions ({res.n_excluded} excluded); "
              f"mean per bin [{means}]")
    return EXIT_OK


COMMANDS = {
    "sim1": _sim1,
    "sim2": _sim2,
    "oracle": lambda config: _report(run_oracle_suite(config)),
    "check": lambda config: _report(run_check_suite(config)),
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args)
        return COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
