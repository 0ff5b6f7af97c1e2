"""Helpers shared by the command modules."""

import argparse
import logging
import os
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Optional

from app.dependencies import RunInputs, load_inputs
from app.schemas.config import RunConfig, load_run_config
from app.schemas.results import Provenance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2


def package_version() -> str:
    try:
        return version("gridstorm")
    except PackageNotFoundError:
        return "0+unknown"


def add_config_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="Run config JSON (see `gridstorm defaults` for every key and default)")


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="Output directory (default: output_dir from the config)")


def add_workers_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Parallel workers (default: ensemble.workers from the config, else GRIDSTORM_WORKERS)",
    )


def load_config_and_inputs(path: str) -> tuple[RunConfig, RunInputs]:
    config = load_run_config(path)
    return config, load_inputs(config)


def output_dir(args: argparse.Namespace, config: Optional[RunConfig] = None) -> Path:
    out = Path(args.out) if args.out else Path(config.output_dir if config else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_provenance(
    directory: str | os.PathLike,
    command: str,
    config_hash: str,
    seed: Optional[int] = None,
    options: Optional[dict] = None,
) -> Path:
    path = Path(directory) / "provenance.json"
    record = Provenance(
        config_hash=config_hash,
        command=command,
        seed=seed,
        options=options or {},
        package_version=package_version(),
    )
    path.write_text(record.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
