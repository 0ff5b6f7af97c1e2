"""gridstorm simulate: one realization, written as CSV files."""

import argparse
import logging
from dataclasses import replace

from app.commands.common import (
    EXIT_OK,
    add_config_argument,
    add_output_argument,
    load_config_and_inputs,
    output_dir,
    write_provenance,
)
from app.dependencies import build_scenario
from app.simulation.loop import run_realization
from app.simulation.outputs import write_realization
from app.simulation.streams import realization_seed

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    config, inputs = load_config_and_inputs(args.config)
    seed = args.seed if args.seed is not None else realization_seed(config.ensemble.master_seed, args.index)
    out = output_dir(args, config)

    scenario = build_scenario(inputs)
    if args.dump_lp:
        scenario = replace(scenario, params=replace(scenario.params, lp_dump_dir=args.dump_lp))
    result = run_realization(scenario, seed, args.index)
    written = write_realization(result, inputs.horizon.times, out)
    write_provenance(out, "simulate", inputs.config_hash, seed=seed, options={"index": args.index})

    blackout = "none" if result.blackout_step is None else f"step {result.blackout_step}"
    logger.info(
        f"Realization {args.index} (seed {seed}): final performance {result.final_performance:.4f}, "
        f"blackout {blackout}, {len(result.events)} events; wrote {len(written)} files to {out}"
    )
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate",
        help="Run one realization",
        description="Writes trajectory.csv, events.csv, solar.csv, regions.csv (when buses carry regions), "
        "flows.csv (when cascade.record_flows is set) and provenance.json.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_config_argument(parser)
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Realization seed (default: the seed realization --index gets in an ensemble with the config's master seed)",
    )
    parser.add_argument("--index", type=int, default=0, help="Realization index recorded in the outputs")
    parser.add_argument("--dump-lp", default=None, metavar="DIR", help="Write every dispatch problem to DIR in LP format")
    add_output_argument(parser)
    parser.set_defaults(handler=run)
