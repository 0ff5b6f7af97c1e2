"""
Seeded realization ensembles.

Realization i always runs with seed stable_mix(master_seed, i); work is cut
into chunks of consecutive indices and handed to joblib. Outcomes are sorted
by index before anything is aggregated, so the worker count and scheduling
never change a result.
"""

import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from joblib import Parallel, delayed

from app.config import settings
from app.errors import ConfigError
from app.schemas.results import Manifest, ManifestEntry
from app.simulation.loop import Scenario, run_realization
from app.simulation.state import RealizationResult
from app.simulation.streams import realization_seed
from app.store.results import ResultStore

logger = logging.getLogger(__name__)


@dataclass
class RealizationOutcome:
    index: int
    seed: int
    result: Optional[RealizationResult] = None
    error: Optional[str] = None


@dataclass
class EnsembleRun:
    n: int
    master_seed: int
    outcomes: list[RealizationOutcome]
    preset: Optional[tuple[str, float]] = None

    @property
    def results(self) -> list[RealizationResult]:
        return [o.result for o in self.outcomes if o.result is not None]

    @property
    def failed_indices(self) -> list[int]:
        return [o.index for o in self.outcomes if o.result is None]


def _run_chunk(
    scenario: Scenario, tasks: list[tuple[int, int]], preset: Optional[tuple[str, float]]
) -> list[RealizationOutcome]:
    out = []
    for index, seed in tasks:
        try:
            out.append(RealizationOutcome(index, seed, run_realization(scenario, seed, index, preset)))
        except Exception as e:
            logger.error(f"Realization {index} (seed {seed}) failed: {e}")
            out.append(RealizationOutcome(index, seed, error=str(e)))
    return out


def run_ensemble(
    scenario: Scenario,
    n: int,
    master_seed: int,
    workers: Optional[int] = None,
    preset: Optional[tuple[str, float]] = None,
) -> EnsembleRun:
    if n < 1:
        raise ConfigError("ensemble size n must be at least 1")
    workers = workers or settings.workers
    tasks = [(i, realization_seed(master_seed, i)) for i in range(n)]
    size = max(1, settings.chunk_size)
    chunks = [tasks[i : i + size] for i in range(0, n, size)]

    logger.info(f"Running {n} realizations (master seed {master_seed}) on {workers} worker(s)")
    if workers == 1 or len(chunks) == 1:
        batches = [_run_chunk(scenario, c, preset) for c in chunks]
    else:
        batches = Parallel(n_jobs=workers, backend=settings.joblib_backend)(
            delayed(_run_chunk)(scenario, c, preset) for c in chunks
        )

    outcomes = sorted((o for batch in batches for o in batch), key=lambda o: o.index)
    run = EnsembleRun(n=n, master_seed=master_seed, outcomes=outcomes, preset=preset)
    if run.failed_indices:
        logger.warning(f"{len(run.failed_indices)} of {n} realizations failed")
    return run


def store_ensemble(
    store: ResultStore,
    run: EnsembleRun,
    scenario: Scenario,
    config_hash: str,
    times: tuple[datetime, ...],
    integration_level: Optional[float] = None,
) -> Manifest:
    """Write every realization record and the manifest that indexes them."""
    entries = []
    for o in run.outcomes:
        if o.result is None:
            entries.append(ManifestEntry(index=o.index, seed=o.seed, error=o.error))
        else:
            entries.append(ManifestEntry(index=o.index, seed=o.seed, file=store.write_realization(o.result)))
    manifest = Manifest(
        config_hash=config_hash,
        n=run.n,
        master_seed=run.master_seed,
        integration_level=integration_level,
        preset={"component": run.preset[0], "rank": run.preset[1]} if run.preset else None,
        times=[t.strftime("%Y-%m-%dT%H:%M:%SZ") for t in times],
        line_ids=[ln.id for ln in scenario.grid.lines],
        regions=list(scenario.grid.regions),
        realizations=entries,
    )
    store.write_manifest(manifest)
    return manifest
