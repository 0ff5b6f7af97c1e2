"""gridstorm preset: blackout probability with one component's resistance pinned."""

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
from app.dependencies import build_scenario
from app.errors import ConfigError
from app.services.preset import preset_experiment, write_preset

logger = logging.getLogger(__name__)


def _ranks(text: str) -> tuple[float, ...]:
    try:
        ranks = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse ranks '{text}'")
    if not ranks or any(not 0.0 < r < 1.0 for r in ranks):
        raise ConfigError("ranks must lie strictly between 0 and 1")
    return ranks


def run(args: argparse.Namespace) -> int:
    config, inputs = load_config_and_inputs(args.config)
    n = args.n or config.ensemble.n
    master_seed = args.seed if args.seed is not None else config.ensemble.master_seed
    ranks = _ranks(args.ranks) if args.ranks else tuple(config.ensemble.preset_ranks)
    component = args.component or config.ensemble.preset_component
    out = output_dir(args, config)

    rows = preset_experiment(
        build_scenario(inputs), n, master_seed, component, ranks, args.workers or config.ensemble.workers
    )
    write_preset(rows, out)
    write_provenance(
        out, "preset", inputs.config_hash, seed=master_seed, options={"n": n, "component": rows[0].component, "ranks": list(ranks)}
    )
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "preset",
        help="Preset-resistance experiment on one component",
        description="Runs a baseline ensemble and one ensemble per rank with the component's resistance "
        "pinned at that rank of its distribution; writes preset.csv and provenance.json.",
    )
    add_config_argument(parser)
    parser.add_argument(
        "--component",
        default=None,
        help="Component id (default: ensemble.preset_component, else the line with the highest critical index)",
    )
    parser.add_argument("--ranks", default=None, help="Comma list of ranks in (0, 1) (default: ensemble.preset_ranks)")
    parser.add_argument("--n", type=int, default=None, help="Realizations per ensemble (default: ensemble.n)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: ensemble.master_seed)")
    add_workers_argument(parser)
    add_output_argument(parser)
    parser.set_defaults(handler=run)
