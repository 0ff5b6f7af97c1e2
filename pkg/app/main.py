import argparse
import logging
import sys
from typing import Optional

from app.commands import compare, defaults, ensemble, metrics, preset, simulate, sweep, testbed, validate
from app.commands.common import EXIT_RUNTIME, package_version
from app.config import settings
from app.errors import GridstormError

logger = logging.getLogger("app")

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridstorm",
        description="Monte Carlo simulation of storm-driven cascading power outages. "
        "Exit codes: 0 success, 1 runtime or config error, 2 validation failure.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {package_version()}")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help=f"Logging level on stderr (default: {settings.log_level}, env GRIDSTORM_LOG_LEVEL)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for module in (validate, simulate, ensemble, sweep, metrics, compare, preset, testbed, defaults):
        module.register(subparsers)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, level=level.upper(), force=True)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except GridstormError as e:
        logger.error(str(e))
        for err in e.detail.get("errors", []):
            logger.error(f"  {err['loc']}: {err['msg']}")
        return EXIT_RUNTIME
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
