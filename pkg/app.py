"""polyspec command line: verification runs, lemma fuzzing, Fourier checks and bound tables"""
import argparse
import logging
import sys
from pathlib import Path

# Add the project root directory to Python path
root_dir = Path(__file__).parent.absolute()
sys.path.append(str(root_dir))

import settings  # noqa: E402
from cli_harness import EXIT_CONFIG, EXIT_SOLVER, ConfigError  # noqa: E402
from commands import bounds, fourier_check, lemma1_fuzz, run  # noqa: E402
from eigensolver import SolverError  # noqa: E402
from geometry import DomainError  # noqa: E402

logger = logging.getLogger("polyspec")


def build_parser():
    parser = argparse.ArgumentParser(prog="polyspec", description=__doc__)
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="logging level (env POLYSPEC_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, module in (("run", run), ("lemma1-fuzz", lemma1_fuzz),
                         ("fourier-check", fourier_check), ("bounds", bounds)):
        sub = subparsers.add_parser(name, help=module.__doc__)
        module.add_arguments(sub)
        sub.set_defaults(handler=module.run)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except SolverError as e:
        logger.error(f"solver failure: {e} (residuals {list(e.residuals)})")
        return EXIT_SOLVER
    except (ConfigError, DomainError, FileNotFoundError) as e:
        logger.error(f"invalid input: {e}")
        return EXIT_CONFIG
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
