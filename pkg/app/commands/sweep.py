"""gridstorm sweep: blackout probability across renewable-integration levels."""

import argparse
import logging

from app.commands.common import (
    EXIT_OK,
    add_config_argument,
    add_output_argument,
    add_workers_argument,
    load_config_and_inputs,
    output_dir,
    write_provenance,
)
from app.services.sweep import parse_levels, sensitivity_sweep, write_sweep

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    config, inputs = load_config_and_inputs(args.config)
    levels = parse_levels(args.levels) if args.levels else list(config.ensemble.sweep_levels)
    n = args.n or config.ensemble.n
    master_seed = args.seed if args.seed is not None else config.ensemble.master_seed
    out = output_dir(args, config)

    results = sensitivity_sweep(inputs, levels, n, master_seed, args.workers or config.ensemble.workers)
    for lv in results:
        level_dir = out / f"level_{lv.level:.3f}"
        level_dir.mkdir(parents=True, exist_ok=True)
        (level_dir / "summary.json").write_text(lv.summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    path = write_sweep(results, out)
    write_provenance(out, "sweep", inputs.config_hash, seed=master_seed, options={"n": n, "levels": levels})
    logger.info(f"Sweep over {len(levels)} levels written to {path}")
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "sweep",
        help="Sensitivity sweep over BTM solar integration levels (paired seeds)",
        description="Writes sweep.csv (level,blackout_probability,median_blackout_step,n), "
        "one summary.json per level and provenance.json.",
    )
    add_config_argument(parser)
    parser.add_argument(
        "--levels",
        default=None,
        help="Comma list or inclusive range start:stop:step, e.g. 0.1:0.8:0.1 (default: ensemble.sweep_levels)",
    )
    parser.add_argument("--n", type=int, default=None, help="Realizations per level (default: ensemble.n)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed shared by every level (default: ensemble.master_seed)")
    add_workers_argument(parser)
    add_output_argument(parser)
    parser.set_defaults(handler=run)
