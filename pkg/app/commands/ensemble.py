"""gridstorm ensemble: seeded realizations in parallel, stored and summarized."""

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
from app.services.ensemble import run_ensemble, store_ensemble
from app.services.metrics import summarize, write_summary_artifacts
from app.store.results import ResultStore

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    config, inputs = load_config_and_inputs(args.config)
    n = args.n or config.ensemble.n
    master_seed = args.seed if args.seed is not None else config.ensemble.master_seed
    workers = args.workers or config.ensemble.workers
    out = output_dir(args, config)

    scenario = build_scenario(inputs)
    ensemble = run_ensemble(scenario, n, master_seed, workers)
    manifest = store_ensemble(
        ResultStore(out), ensemble, scenario, inputs.config_hash, inputs.horizon.times, config.grid.integration_level
    )
    line_ids = manifest.line_ids
    summary = summarize(ensemble.results, n, inputs.config_hash, manifest.times, line_ids, ensemble.failed_indices)
    write_summary_artifacts(summary, ensemble.results, line_ids, out)
    write_provenance(out, "ensemble", inputs.config_hash, seed=master_seed, options={"n": n})

    logger.info(
        f"Ensemble of {n}: blackout probability {summary.blackout_probability:.3f}, "
        f"{summary.failed_count} failed; results in {out}"
    )
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "ensemble",
        help="Run a seeded realization ensemble",
        description="Stores one JSON record per realization plus manifest.json, then writes summary.json, "
        "points_resilient.csv, points_vulnerable.csv, critical_timing.csv and provenance.json. "
        "Results do not depend on --workers.",
    )
    add_config_argument(parser)
    parser.add_argument("--n", type=int, default=None, help="Realizations (default: ensemble.n from the config)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: ensemble.master_seed)")
    add_workers_argument(parser)
    add_output_argument(parser)
    parser.set_defaults(handler=run)
