"""
Renewable-integration sensitivity sweep with paired seeds.

Every level reuses the same master seed, so realization i draws identical
resistances at every level and only the installed BTM solar differs.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import pandas as pd

from app.dependencies import RunInputs, build_scenario
from app.errors import ConfigError
from app.grid.scaling import scale_renewable_integration
from app.schemas.results import EnsembleSummary, SweepRow
from app.services.ensemble import EnsembleRun, run_ensemble
from app.services.metrics import summarize

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["level", "blackout_probability", "median_blackout_step", "n"]


@dataclass
class SweepLevel:
    level: float
    run: EnsembleRun
    summary: EnsembleSummary

    @property
    def row(self) -> SweepRow:
        return SweepRow(
            level=self.level,
            blackout_probability=self.summary.blackout_probability,
            median_blackout_step=self.summary.median_blackout_step,
            n=self.summary.n,
            failed_count=self.summary.failed_count,
        )


def parse_levels(text: str) -> list[float]:
    """'0.1,0.3,0.5' or an inclusive range 'start:stop:step' such as '0.1:0.8:0.1'."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"level range '{text}' needs step > 0 and stop >= start")
            count = int(round((stop - start) / step)) + 1
            return [round(start + k * step, 10) for k in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse integration levels '{text}'")


def sensitivity_sweep(
    inputs: RunInputs,
    levels: list[float],
    n: int,
    master_seed: int,
    workers: Optional[int] = None,
) -> list[SweepLevel]:
    if not levels:
        raise ConfigError("sweep needs at least one integration level")
    times = [t.strftime("%Y-%m-%dT%H:%M:%SZ") for t in inputs.horizon.times]
    line_ids = [ln.id for ln in inputs.grid.lines]

    out = []
    for level in levels:
        grid = scale_renewable_integration(inputs.grid, level, inputs.horizon, inputs.diurnal)
        scenario = build_scenario(inputs, grid)
        run = run_ensemble(scenario, n, master_seed, workers)
        summary = summarize(run.results, n, inputs.config_hash, times, line_ids, run.failed_indices)
        logger.info(f"Level {level:.3f}: blackout probability {summary.blackout_probability:.3f}")
        out.append(SweepLevel(level, run, summary))
    return out


def write_sweep(levels: list[SweepLevel], directory: str | os.PathLike) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    path = d / "sweep.csv"
    rows = [lv.row for lv in levels]
    pd.DataFrame(
        [[r.level, r.blackout_probability, r.median_blackout_step, r.n] for r in rows], columns=SWEEP_COLUMNS
    ).to_csv(path, index=False)
    return path
