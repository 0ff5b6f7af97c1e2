"""gridstorm validate: check a config and every input it references."""

import argparse
import json
import logging
import sys

from app.commands.common import EXIT_INVALID, EXIT_OK, add_config_argument
from app.dependencies import check_paths, resolve_horizon
from app.dispatch.problem import DispatchCosts
from app.errors import GridstormError
from app.grid.loader import GridPaths, load_grid
from app.grid.scaling import scale_renewable_integration
from app.hazard.roughness import load_roughness
from app.hazard.track import load_track
from app.schemas.config import config_hash, load_run_config
from app.services.observed import load_observed
from app.vulnerability.fragility import DEFAULT_CURVES, load_fragility
from app.vulnerability.resistance import sample_resistances
from app.vulnerability.solar import DiurnalShape

logger = logging.getLogger(__name__)


def _entry(e: GridstormError) -> dict:
    return {"code": e.code, "message": e.message, "detail": e.detail}


def validation_report(path: str) -> dict:
    """Run every check that can run; later checks are skipped when their inputs failed to load."""
    errors: list[dict] = []
    report = {"config": path, "config_hash": None, "valid": False, "errors": errors}

    try:
        config = load_run_config(path)
    except GridstormError as e:
        errors.append(_entry(e))
        return report
    report["config_hash"] = config_hash(config)

    try:
        check_paths(config)
    except GridstormError as e:
        errors.append(_entry(e))

    def attempt(fn, *a, **kw):
        try:
            return fn(*a, **kw)
        except GridstormError as e:
            errors.append(_entry(e))
            return None

    c = config
    grid = attempt(
        load_grid,
        GridPaths.from_dir(c.inputs.grid_dir),
        system_base=c.grid.system_base_mva,
        frequency=c.grid.frequency_hz,
        customers_per_mw=c.grid.customers_per_mw,
    )
    track = attempt(load_track, c.inputs.track)
    if c.inputs.roughness:
        attempt(load_roughness, c.inputs.roughness)
    curves = attempt(load_fragility, c.inputs.fragility) if c.inputs.fragility else dict(DEFAULT_CURVES)
    if c.inputs.observed:
        attempt(load_observed, c.inputs.observed)
    diurnal = attempt(
        DiurnalShape, tuple((float(h), float(v)) for h, v in c.solar.diurnal_knots), c.solar.diurnal_interpolation
    )

    horizon = attempt(resolve_horizon, c, track) if track is not None else None
    if grid is not None:
        attempt(DispatchCosts(c.dispatch.value_of_lost_load, c.dispatch.curtailment_cost).check_ordering, grid)
        if curves is not None:
            attempt(sample_resistances, grid, curves, 0, c.vulnerability.tower_spacing_km)
        if c.grid.integration_level is not None and horizon is not None and diurnal is not None:
            attempt(scale_renewable_integration, grid, c.grid.integration_level, horizon, diurnal)
    if track is not None and horizon is not None and (track.end < horizon.start or track.start > horizon.end):
        logger.warning("Storm track does not overlap the simulated horizon; every step will be quiescent")

    report["valid"] = not errors
    return report


def run(args: argparse.Namespace) -> int:
    report = validation_report(args.config)
    json.dump(report, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    if report["valid"]:
        logger.info(f"{args.config}: valid")
        return EXIT_OK
    logger.error(f"{args.config}: {len(report['errors'])} validation error(s)")
    return EXIT_INVALID


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "validate",
        help="Check a run config and all referenced inputs",
        description="Runs every grid, track, roughness, fragility and observed-data check. "
        "Prints a JSON report on stdout; exit code 0 when clean, 2 otherwise.",
    )
    add_config_argument(parser)
    parser.set_defaults(handler=run)
