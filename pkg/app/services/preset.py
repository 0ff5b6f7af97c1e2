"""
Preset-resistance experiment: how much does one component's strength move
the blackout probability? A baseline ensemble is compared with ensembles in
which that component's resistance is pinned at fixed ranks of its
distribution (weakest 1%, weakest 10%, strongest 1% by default), all on the
same seeds.
"""

import logging
import os
from pathlib import Path
from typing import Optional

import pandas as pd

from app.errors import UnknownComponent
from app.schemas.results import PresetRow
from app.services.ensemble import run_ensemble
from app.services.metrics import blackout_probability, critical_index
from app.simulation.loop import Scenario

logger = logging.getLogger(__name__)

DEFAULT_PRESET_RANKS = (0.01, 0.10, 0.99)
PRESET_COLUMNS = ["component", "rank", "blackout_probability", "delta", "n"]


def most_critical_line(index: dict[str, float]) -> Optional[str]:
    """Highest critical index; ties go to the lowest line id."""
    if not index:
        return None
    return min(index, key=lambda lid: (-index[lid], lid))


def preset_experiment(
    scenario: Scenario,
    n: int,
    master_seed: int,
    component: Optional[str] = None,
    ranks: tuple[float, ...] = DEFAULT_PRESET_RANKS,
    workers: Optional[int] = None,
) -> list[PresetRow]:
    baseline = run_ensemble(scenario, n, master_seed, workers)
    p_base = blackout_probability(baseline.results, n)

    if component is None:
        component = most_critical_line(critical_index(baseline.results, [ln.id for ln in scenario.grid.lines], n))
        if component is None:
            raise UnknownComponent("<no transmission line to preset>")
        logger.info(f"Preset component defaults to most critical line '{component}'")
    elif component not in scenario.exposure.component_col:
        raise UnknownComponent(component)

    rows = [PresetRow(component=component, rank=None, blackout_probability=p_base, delta=0.0, n=n)]
    for rank in ranks:
        run = run_ensemble(scenario, n, master_seed, workers, preset=(component, rank))
        p = blackout_probability(run.results, n)
        logger.info(f"Preset {component} at rank {rank:g}: blackout probability {p:.3f} ({p - p_base:+.3f})")
        rows.append(PresetRow(component=component, rank=rank, blackout_probability=p, delta=p - p_base, n=n))
    return rows


def write_preset(rows: list[PresetRow], directory: str | os.PathLike) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    path = d / "preset.csv"
    pd.DataFrame(
        [[r.component, "baseline" if r.rank is None else r.rank, r.blackout_probability, r.delta, r.n] for r in rows],
        columns=PRESET_COLUMNS,
    ).to_csv(path, index=False)
    return path
