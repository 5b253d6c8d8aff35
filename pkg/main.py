"""Main entry point - parses the command line and runs the experiment app."""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from ophrl import settings
from ophrl.app import ExperimentApp
from ophrl.core.errors import ConfigurationError, OPHRLError
from ophrl.envs import DOMAINS
from ophrl.presets import PRESETS

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ophrl", description="Off-policy hierarchical RL experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run an experiment config file")
    run.add_argument("config")
    run.add_argument("--out", help="output directory")
    run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    pre = commands.add_parser("preset", help="run a built-in experiment")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("--out", help="output directory")
    pre.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    oracle = commands.add_parser("oracle", help="solve a domain by value iteration")
    oracle.add_argument("domain", choices=DOMAINS)
    oracle.add_argument("--width", type=int, help="cliff width")
    oracle.add_argument("--gamma", type=float, default=1.0)
    oracle.add_argument("--dump", help="write Q* to this file")

    validate = commands.add_parser("validate", help="check a config file and its agent")
    validate.add_argument("config")
    validate.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    diagnose = commands.add_parser("diagnose", help="run a diagnostic battery")
    diagnose.add_argument("battery", choices=["bandit"])
    diagnose.add_argument("--runs", type=int, default=1000)
    diagnose.add_argument("--episodes", type=int, default=500)
    diagnose.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level=settings.LOG_LEVEL)

    app = ExperimentApp(output_dir=getattr(args, "out", None))
    try:
        if args.command == "run":
            app.run_config(args.config, args.override)
        elif args.command == "preset":
            app.run_preset(args.name, args.override)
        elif args.command == "oracle":
            app.oracle(args.domain, width=args.width, gamma=args.gamma, dump=args.dump)
        elif args.command == "validate":
            app.validate(args.config, args.override)
        elif args.command == "diagnose":
            app.diagnose_bandit(args.runs, args.episodes, args.seed)
    except ConfigurationError as exc:
        logger.error(str(exc))
        return EXIT_CONFIG
    except (OPHRLError, OSError) as exc:
        logger.error(str(exc))
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
