"""gridstorm defaults: print the documented defaults table."""

import argparse
import json
import sys

from app.commands.common import EXIT_OK
from app.schemas.config import defaults_table


def run(args: argparse.Namespace) -> int:
    rows = defaults_table()
    if args.format == "json":
        json.dump(rows, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")
        return EXIT_OK
    width = max(len(r["key"]) for r in rows)
    for r in rows:
        default = "(required)" if r["required"] else json.dumps(r["default"], default=str)
        sys.stdout.write(f"{r['key']:<{width}}  {default:<24}  {r['description']}\n")
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("defaults", help="Print every run-config key with its default and meaning")
    parser.add_argument("--format", choices=("table", "json"), default="table")
    parser.set_defaults(handler=run)
