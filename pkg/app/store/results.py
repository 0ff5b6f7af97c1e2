"""
On-disk ensemble results: one JSON file per realization plus a manifest,
so every ensemble metric can be recomputed without re-simulating.

  <dir>/manifest.json
  <dir>/realizations/r000000.json ...
"""

import logging
import os
from pathlib import Path

from app.errors import MissingFile, ParseError
from app.schemas.results import EventRecord, Manifest, RealizationRecord
from app.simulation.state import Event, EventKind, RealizationResult

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
REALIZATION_DIR = "realizations"


def realization_file(index: int) -> str:
    return f"{REALIZATION_DIR}/r{index:06d}.json"


def to_record(result: RealizationResult) -> RealizationRecord:
    step, drop = result.largest_failure
    return RealizationRecord(
        index=result.index,
        seed=result.seed,
        performance=result.performance,
        served_mw=result.served_mw,
        shed_mw=result.shed_mw,
        events=[EventRecord(step=e.step, kind=e.kind.value, component=e.component, magnitude=e.magnitude) for e in result.events],
        blackout_step=result.blackout_step,
        largest_failure_step=step,
        largest_failure_drop=drop,
        line_failure_steps=result.line_failure_steps,
        region_performance=result.region_performance,
        solar_actual_mw=result.solar_actual_mw,
        solar_clear_sky_mw=result.solar_clear_sky_mw,
    )


def from_record(record: RealizationRecord) -> RealizationResult:
    return RealizationResult(
        index=record.index,
        seed=record.seed,
        performance=list(record.performance),
        served_mw=list(record.served_mw),
        shed_mw=list(record.shed_mw),
        events=[Event(e.step, EventKind(e.kind), e.component, e.magnitude) for e in record.events],
        blackout_step=record.blackout_step,
        largest_failure=(record.largest_failure_step, record.largest_failure_drop),
        line_failure_steps=dict(record.line_failure_steps),
        region_performance={k: list(v) for k, v in record.region_performance.items()},
        solar_actual_mw=list(record.solar_actual_mw),
        solar_clear_sky_mw=list(record.solar_clear_sky_mw),
    )


class ResultStore:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    @property
    def manifest_path(self) -> Path:
        return self.directory / MANIFEST_FILE

    def write_realization(self, result: RealizationResult) -> str:
        name = realization_file(result.index)
        path = self.directory / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_record(result).model_dump_json(), encoding="utf-8")
        return name

    def read_realization(self, name: str) -> RealizationResult:
        path = self.directory / name
        if not path.exists():
            raise MissingFile(str(path))
        try:
            return from_record(RealizationRecord.model_validate_json(path.read_text(encoding="utf-8")))
        except ValueError as e:
            raise ParseError(f"unreadable realization record: {e}", source=name)

    def write_manifest(self, manifest: Manifest) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return self.manifest_path

    def read_manifest(self) -> Manifest:
        if not self.manifest_path.exists():
            raise MissingFile(str(self.manifest_path))
        try:
            return Manifest.model_validate_json(self.manifest_path.read_text(encoding="utf-8"))
        except ValueError as e:
            raise ParseError(f"unreadable manifest: {e}", source=MANIFEST_FILE)

    def load_results(self, manifest: Manifest | None = None) -> list[RealizationResult]:
        """Stored realizations in index order; failed entries are skipped."""
        manifest = manifest or self.read_manifest()
        results = [self.read_realization(e.file) for e in sorted(manifest.realizations, key=lambda e: e.index) if e.file]
        logger.info(f"Loaded {len(results)} stored realizations from {self.directory}")
        return results
