import argparse
import sys

from dotenv import load_dotenv

# Component imports
from src.components import bounds, design, history, simulate, sweep
from src.core.errors import InvariantViolation, ScenarioParseError, SolverError, UsageError
from src.utils import help
from src.utils.log import log_error, set_log_level_to_debug

# Load environment variables
load_dotenv()

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVARIANT = 4
EXIT_SOLVER = 5
EXIT_IO = 6


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamscan",
        description="Design and evaluate non-interactive multi-user beam-alignment codebooks.",
        epilog=help.render(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--debug", action="store_true", help="Verbose logging")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for component in (design, simulate, sweep, bounds, history):
        component.add_parser(subparsers)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.debug:
        set_log_level_to_debug()

    try:
        return args.handler(args)
    except UsageError as e:
        log_error(f"Usage error: {e}")
        return EXIT_USAGE
    except ScenarioParseError as e:
        log_error(f"Parse error: {e}")
        return EXIT_PARSE
    except InvariantViolation as e:
        log_error(f"Invariant violation: {e}")
        return EXIT_INVARIANT
    except SolverError as e:
        log_error(f"Solver error: {e}")
        return EXIT_SOLVER
    except OSError as e:
        log_error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
