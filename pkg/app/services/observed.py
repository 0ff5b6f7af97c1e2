"""
Comparison of simulated performance with an observed outage record.

observed.csv: time_iso8601,region,pct_with_power   (percent, 0-100)
The aggregate curve uses region "all"; without it the unweighted mean over
the listed regions stands in.
"""

import logging
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from dateutil import parser as dateparser

from app.errors import MisalignedTimeGrid, MissingFile, ParseError
from app.schemas.results import ComparisonReport, ComparisonStep, EnsembleSummary
from app.services.metrics import QUANTILE_LEVELS, quantile_key
from app.simulation.horizon import Horizon
from app.simulation.state import BLACKOUT_TOL, RealizationResult

logger = logging.getLogger(__name__)

OBSERVED_COLUMNS = ["time_iso8601", "region", "pct_with_power"]
AGGREGATE_REGION = "all"
BAND_TOL = 1e-12


@dataclass(frozen=True)
class ObservedTrajectory:
    series: dict[str, tuple[tuple[datetime, float], ...]]  # region -> (time, percent with power)

    def curve(self, region: str = AGGREGATE_REGION) -> tuple[tuple[datetime, float], ...]:
        if region in self.series:
            return self.series[region]
        if region != AGGREGATE_REGION or not self.series:
            return ()
        logger.warning("Observed data has no aggregate rows; averaging regions without weights")
        by_time: dict[datetime, list[float]] = {}
        for points in self.series.values():
            for t, v in points:
                by_time.setdefault(t, []).append(v)
        return tuple((t, float(np.mean(v))) for t, v in sorted(by_time.items()))


def load_observed(path: str | os.PathLike) -> ObservedTrajectory:
    p = Path(path)
    if not p.exists():
        raise MissingFile(str(path))
    try:
        df = pd.read_csv(p, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return ObservedTrajectory({})
    missing = [c for c in OBSERVED_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError(f"missing columns {missing}", source=p.name)

    series: dict[str, dict[datetime, float]] = {}
    for i, rec in enumerate(df.to_dict("records"), start=1):
        try:
            t = dateparser.isoparse(rec["time_iso8601"].strip())
        except ValueError:
            raise ParseError("not an ISO-8601 timestamp", row=i, column="time_iso8601", source=p.name)
        t = t.replace(tzinfo=timezone.utc) if t.tzinfo is None else t.astimezone(timezone.utc)
        try:
            value = float(rec["pct_with_power"])
        except ValueError:
            raise ParseError("not a number", row=i, column="pct_with_power", source=p.name)
        if not 0.0 <= value <= 100.0:
            raise ParseError("percentage outside [0, 100]", row=i, column="pct_with_power", source=p.name)
        region = rec["region"].strip() or AGGREGATE_REGION
        points = series.setdefault(region, {})
        if t in points:
            raise ParseError(f"duplicate time for region '{region}'", row=i, column="time_iso8601", source=p.name)
        points[t] = value
    return ObservedTrajectory({r: tuple(sorted(pts.items())) for r, pts in series.items()})


def _bands(source: Union[EnsembleSummary, RealizationResult], region: str) -> dict[str, list[float]]:
    if isinstance(source, RealizationResult):
        curve = source.performance if region == AGGREGATE_REGION else source.region_performance.get(region)
        if curve is None:
            raise MisalignedTimeGrid(f"simulation has no region '{region}'")
        return {quantile_key(q): list(curve) for q in QUANTILE_LEVELS}
    if region == AGGREGATE_REGION:
        return source.quantiles
    curve = source.region_median_performance.get(region)
    if curve is None:
        raise MisalignedTimeGrid(f"simulation has no region '{region}'")
    # only the regional median is kept in the summary
    return {quantile_key(q): list(curve) for q in QUANTILE_LEVELS}


def _blackout_position(
    source: Union[EnsembleSummary, RealizationResult], step: int
) -> tuple[Optional[float], Optional[bool]]:
    if isinstance(source, RealizationResult):
        if source.blackout_step is None:
            return None, False
        return (1.0 if source.blackout_step <= step else 0.0), source.blackout_step == step
    hist = np.asarray(source.blackout_histogram)
    total = int(hist.sum())
    if total == 0:
        return None, False
    support = np.flatnonzero(hist)
    return float(hist[: step + 1].sum() / total), bool(support[0] <= step <= support[-1])


def compare_observed(
    source: Union[EnsembleSummary, RealizationResult],
    observed: ObservedTrajectory,
    horizon: Horizon,
    config_hash: str,
    region: str = AGGREGATE_REGION,
) -> ComparisonReport:
    curve = observed.curve(region)
    if not curve:
        raise MisalignedTimeGrid(f"observed data has no points for region '{region}'")

    aligned = []
    for t, pct in curve:
        k = horizon.index_of(t)
        if k is None:
            raise MisalignedTimeGrid(f"observed time {t.isoformat()} is not a step of the simulated horizon")
        aligned.append((k, t, pct / 100.0))

    bands = _bands(source, region)
    steps = []
    for k, t, obs in aligned:
        q = {key: float(bands[key][k]) for key in bands}
        steps.append(
            ComparisonStep(
                step=k,
                time_utc=t.strftime("%Y-%m-%dT%H:%M:%SZ"),
                observed=obs,
                p05=q["p05"], p25=q["p25"], p50=q["p50"], p75=q["p75"], p95=q["p95"],
                deviation=obs - q["p50"],
            )
        )

    def share(lo: str, hi: str) -> float:
        inside = [s for s in steps if getattr(s, lo) - BAND_TOL <= s.observed <= getattr(s, hi) + BAND_TOL]
        return len(inside) / len(steps)

    blackout = next((s.step for s in steps if s.observed <= BLACKOUT_TOL), None)
    quantile, in_support = _blackout_position(source, blackout) if blackout is not None else (None, None)
    return ComparisonReport(
        config_hash=config_hash,
        region=region,
        steps=steps,
        coverage_50=share("p25", "p75"),
        coverage_90=share("p05", "p95"),
        max_abs_deviation=max(abs(s.deviation) for s in steps),
        observed_blackout_step=blackout,
        observed_blackout_quantile=quantile,
        observed_blackout_in_support=in_support,
    )


def write_comparison(report: ComparisonReport, directory: str | os.PathLike) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    json_path = d / "comparison.json"
    json_path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    csv_path = d / "comparison.csv"
    pd.DataFrame([s.model_dump() for s in report.steps]).to_csv(csv_path, index=False)
    return [json_path, csv_path]
