"""gridstorm compare: simulated performance against an observed outage record."""

import argparse
import logging

from app.commands.common import (
    EXIT_OK,
    add_config_argument,
    add_output_argument,
    load_config_and_inputs,
    output_dir,
    write_provenance,
)
from app.dependencies import build_scenario
from app.errors import ConfigError
from app.services.metrics import summarize
from app.services.observed import AGGREGATE_REGION, compare_observed, load_observed, write_comparison
from app.simulation.loop import run_realization
from app.simulation.streams import realization_seed
from app.store.results import ResultStore

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    config, inputs = load_config_and_inputs(args.config)
    observed_path = args.observed or config.inputs.observed
    if not observed_path:
        raise ConfigError("no observed data: pass --observed or set inputs.observed")
    observed = load_observed(observed_path)
    out = output_dir(args, config)

    if args.results:
        store = ResultStore(args.results)
        manifest = store.read_manifest()
        failed = [e.index for e in manifest.realizations if e.file is None]
        source = summarize(store.load_results(manifest), manifest.n, manifest.config_hash, manifest.times, manifest.line_ids, failed)
        seed = manifest.master_seed
    else:
        seed = args.seed if args.seed is not None else realization_seed(config.ensemble.master_seed, 0)
        source = run_realization(build_scenario(inputs), seed)

    report = compare_observed(source, observed, inputs.horizon, inputs.config_hash, region=args.region)
    write_comparison(report, out)
    write_provenance(out, "compare", inputs.config_hash, seed=seed, options={"region": args.region})
    logger.info(
        f"Observed curve ({args.region}): {report.coverage_90:.0%} of steps inside the 5-95% band, "
        f"max deviation from the median {report.max_abs_deviation:.3f}"
    )
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "compare",
        help="Compare simulated performance with observed outage data",
        description="Against a stored ensemble (--results) or a single fresh realization. "
        "Writes comparison.json, comparison.csv and provenance.json.",
    )
    add_config_argument(parser)
    parser.add_argument("--observed", default=None, help="observed.csv (default: inputs.observed from the config)")
    parser.add_argument("--results", default=None, help="Stored ensemble directory to compare against")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the single realization when --results is absent")
    parser.add_argument("--region", default=AGGREGATE_REGION, help=f"Region to compare (default: {AGGREGATE_REGION})")
    add_output_argument(parser)
    parser.set_defaults(handler=run)
