"""gridstorm metrics: recompute ensemble statistics from stored results."""

import argparse
import logging
from pathlib import Path

from app.commands.common import EXIT_OK, write_provenance
from app.services.metrics import summarize, write_summary_artifacts
from app.store.results import ResultStore

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    store = ResultStore(args.results)
    manifest = store.read_manifest()
    results = store.load_results(manifest)
    failed = [e.index for e in manifest.realizations if e.file is None]
    summary = summarize(results, manifest.n, manifest.config_hash, manifest.times, manifest.line_ids, failed)

    out = Path(args.out) if args.out else store.directory
    write_summary_artifacts(summary, results, manifest.line_ids, out)
    write_provenance(out, "metrics", manifest.config_hash, seed=manifest.master_seed, options={"results": str(args.results)})
    logger.info(f"Recomputed summary of {manifest.n} realizations into {out}")
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "metrics",
        help="Recompute summary artifacts from a stored ensemble",
        description="Reads manifest.json and the realization records and rewrites summary.json and the "
        "point-cloud CSVs without re-simulating.",
    )
    parser.add_argument("results", help="Directory holding manifest.json")
    parser.add_argument("--out", default=None, help="Output directory (default: the results directory)")
    parser.set_defaults(handler=run)
