"""
Per-realization CSV outputs:

  trajectory.csv  step,time_utc,performance,served_mw,shed_mw
  events.csv      step,kind,component,magnitude
  regions.csv     step,time_utc,<region>...           (only when buses carry regions)
  solar.csv       step,time_utc,actual_mw,clear_sky_mw
  flows.csv       step,line_id,flow_mw,rating_mw,tripped   (only when flows were recorded)
"""

import os
from datetime import datetime
from pathlib import Path

import pandas as pd

from app.simulation.state import RealizationResult

TRAJECTORY_COLUMNS = ["step", "time_utc", "performance", "served_mw", "shed_mw"]
EVENT_COLUMNS = ["step", "kind", "component", "magnitude"]
FLOW_COLUMNS = ["step", "line_id", "flow_mw", "rating_mw", "tripped"]
SOLAR_COLUMNS = ["step", "time_utc", "actual_mw", "clear_sky_mw"]


def _iso(t: datetime) -> str:
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def trajectory_frame(result: RealizationResult, times: tuple[datetime, ...]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "step": range(len(result.performance)),
            "time_utc": [_iso(t) for t in times[: len(result.performance)]],
            "performance": result.performance,
            "served_mw": result.served_mw,
            "shed_mw": result.shed_mw,
        },
        columns=TRAJECTORY_COLUMNS,
    )


def events_frame(result: RealizationResult) -> pd.DataFrame:
    return pd.DataFrame(
        [[e.step, e.kind.value, e.component, e.magnitude] for e in result.events],
        columns=EVENT_COLUMNS,
    )


def write_realization(
    result: RealizationResult, times: tuple[datetime, ...], directory: str | os.PathLike
) -> list[Path]:
    """Write a realization's CSV files into `directory`; returns the paths written."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []

    path = d / "trajectory.csv"
    trajectory_frame(result, times).to_csv(path, index=False)
    written.append(path)

    path = d / "events.csv"
    events_frame(result).to_csv(path, index=False)
    written.append(path)

    if result.region_performance:
        regions = pd.DataFrame({"step": range(len(result.performance)), "time_utc": [_iso(t) for t in times]})
        for region, series in sorted(result.region_performance.items()):
            regions[region] = series
        path = d / "regions.csv"
        regions.to_csv(path, index=False)
        written.append(path)

    path = d / "solar.csv"
    pd.DataFrame(
        {
            "step": range(len(result.solar_actual_mw)),
            "time_utc": [_iso(t) for t in times[: len(result.solar_actual_mw)]],
            "actual_mw": result.solar_actual_mw,
            "clear_sky_mw": result.solar_clear_sky_mw,
        },
        columns=SOLAR_COLUMNS,
    ).to_csv(path, index=False)
    written.append(path)

    if result.flow_log:
        path = d / "flows.csv"
        pd.DataFrame(
            [[r.step, r.line_id, r.flow_mw, r.rating_mw, "true" if r.tripped else "false"] for r in result.flow_log],
            columns=FLOW_COLUMNS,
        ).to_csv(path, index=False)
        written.append(path)
    return written
