"""gridstorm testbed: write a synthetic input set."""

import argparse
import logging

from app.commands.common import EXIT_OK, write_provenance
from app.grid.synthetic import TestbedKind, write_testbed
from app.schemas.config import config_hash, load_run_config

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    path = write_testbed(args.directory, args.kind, n=args.n)
    config = load_run_config(path)
    write_provenance(path.parent, "testbed", config_hash(config), options={"kind": args.kind})
    print(path)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "testbed",
        help="Write a synthetic grid, storm track, roughness raster, fragility table and config",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("directory", help="Target directory")
    parser.add_argument("--kind", choices=[k.value for k in TestbedKind], default=TestbedKind.SOLAR_HEAVY.value)
    parser.add_argument("--n", type=int, default=50, help="ensemble.n written into the config")
    parser.set_defaults(handler=run)
