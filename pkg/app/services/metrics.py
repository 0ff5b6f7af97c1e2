"""
Ensemble statistics. Everything here is a pure function of realization
results taken in index order, so stored results reproduce the in-run numbers.
"""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from app.schemas.results import EnsembleSummary
from app.simulation.state import RealizationResult

QUANTILE_LEVELS = (5, 25, 50, 75, 95)
POINT_COLUMNS = ["step", "performance", "drop"]
TIMING_COLUMNS = ["line_id", "realization", "failure_step", "blackout"]


def quantile_key(q: int) -> str:
    return f"p{q:02d}"


@dataclass(frozen=True)
class FailurePoint:
    realization: int
    step: int
    performance: float
    drop: float


@dataclass
class Partition:
    resilient: list[int] = field(default_factory=list)
    vulnerable: list[int] = field(default_factory=list)
    resilient_points: list[FailurePoint] = field(default_factory=list)
    vulnerable_points: list[FailurePoint] = field(default_factory=list)


def _ordered(results: list[RealizationResult]) -> list[RealizationResult]:
    return sorted(results, key=lambda r: r.index)


def blackout_probability(results: list[RealizationResult], n: Optional[int] = None) -> float:
    n = n if n is not None else len(results)
    if n == 0:
        return 0.0
    return sum(1 for r in results if r.blackout_step is not None) / n


def blackout_histogram(results: list[RealizationResult], n_steps: int) -> list[int]:
    counts = [0] * n_steps
    for r in results:
        if r.blackout_step is not None:
            counts[r.blackout_step] += 1
    return counts


def median_blackout_step(results: list[RealizationResult]) -> Optional[float]:
    steps = [r.blackout_step for r in results if r.blackout_step is not None]
    return float(np.median(steps)) if steps else None


def critical_index(results: list[RealizationResult], line_ids: list[str], n: Optional[int] = None) -> dict[str, float]:
    """Share of realizations in which the line failed at exactly the blackout step."""
    n = n if n is not None else len(results)
    counts = {lid: 0 for lid in line_ids}
    for r in results:
        if r.blackout_step is None:
            continue
        for lid, step in r.line_failure_steps.items():
            if lid in counts and step == r.blackout_step:
                counts[lid] += 1
    return {lid: (c / n if n else 0.0) for lid, c in counts.items()}


def partition_resilient_vulnerable(results: list[RealizationResult]) -> Partition:
    """Split by blackout; each side carries its largest-failure (step, performance, drop) points."""
    part = Partition()
    for r in _ordered(results):
        step, drop = r.largest_failure
        point = FailurePoint(r.index, step, r.performance[step], drop)
        if r.blackout_step is None:
            part.resilient.append(r.index)
            part.resilient_points.append(point)
        else:
            part.vulnerable.append(r.index)
            part.vulnerable_points.append(point)
    return part


def performance_quantiles(results: list[RealizationResult]) -> dict[str, list[float]]:
    matrix = np.array([r.performance for r in _ordered(results)], dtype=float)
    if matrix.size == 0:
        return {quantile_key(q): [] for q in QUANTILE_LEVELS}
    return {
        quantile_key(q): np.quantile(matrix, q / 100.0, axis=0).tolist() for q in QUANTILE_LEVELS
    }


def region_medians(results: list[RealizationResult]) -> dict[str, list[float]]:
    ordered = _ordered(results)
    regions = sorted({k for r in ordered for k in r.region_performance})
    out = {}
    for region in regions:
        matrix = np.array([r.region_performance[region] for r in ordered if region in r.region_performance])
        out[region] = np.median(matrix, axis=0).tolist()
    return out


def mean_solar_ratio(results: list[RealizationResult]) -> list[float]:
    """Per-step mean of actual over clear-sky distributed solar; 1.0 where clear sky is dark."""
    ordered = _ordered(results)
    if not ordered or not ordered[0].solar_clear_sky_mw:
        return []
    actual = np.array([r.solar_actual_mw for r in ordered], dtype=float)
    clear = np.array([r.solar_clear_sky_mw for r in ordered], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(clear > 0, actual / np.where(clear > 0, clear, 1.0), 1.0)
    return ratio.mean(axis=0).tolist()


def final_performance_stats(results: list[RealizationResult]) -> tuple[float, float]:
    """Mean final performance and its standard error."""
    finals = np.array([r.final_performance for r in _ordered(results)], dtype=float)
    if finals.size == 0:
        return 0.0, 0.0
    if finals.size == 1:
        return float(finals[0]), 0.0
    return float(finals.mean()), float(finals.std(ddof=1) / math.sqrt(finals.size))


def summarize(
    results: list[RealizationResult],
    n: int,
    config_hash: str,
    times: list[str],
    line_ids: list[str],
    failed_indices: Optional[list[int]] = None,
) -> EnsembleSummary:
    """Summary over the successful realizations; probabilities are over all n requested."""
    results = _ordered(results)
    failed_indices = sorted(failed_indices or [])
    part = partition_resilient_vulnerable(results)
    mean_final, stderr_final = final_performance_stats(results)
    return EnsembleSummary(
        config_hash=config_hash,
        n=n,
        failed_count=len(failed_indices),
        failed_indices=failed_indices,
        times=times,
        blackout_probability=blackout_probability(results, n),
        blackout_histogram=blackout_histogram(results, len(times)),
        median_blackout_step=median_blackout_step(results),
        resilient_count=len(part.resilient),
        vulnerable_count=len(part.vulnerable),
        critical_index=critical_index(results, line_ids, n),
        quantiles=performance_quantiles(results),
        mean_final_performance=mean_final,
        stderr_final_performance=stderr_final,
        region_median_performance=region_medians(results),
        mean_solar_ratio=mean_solar_ratio(results),
    )


def critical_timing_points(results: list[RealizationResult], line_ids: list[str]) -> pd.DataFrame:
    """Failure step of every line that failed, with whether its realization blacked out."""
    rows = []
    for r in _ordered(results):
        for lid in line_ids:
            step = r.line_failure_steps.get(lid)
            if step is not None:
                rows.append([lid, r.index, step, r.blackout_step is not None])
    return pd.DataFrame(rows, columns=TIMING_COLUMNS)


def write_summary_artifacts(
    summary: EnsembleSummary, results: list[RealizationResult], line_ids: list[str], directory: str | os.PathLike
) -> list[Path]:
    """summary.json, the two point clouds and the critical-line timing table."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []

    path = d / "summary.json"
    path.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    written.append(path)

    part = partition_resilient_vulnerable(results)
    for name, points in (("points_resilient.csv", part.resilient_points), ("points_vulnerable.csv", part.vulnerable_points)):
        path = d / name
        pd.DataFrame(
            [[p.step, p.performance, p.drop] for p in points], columns=POINT_COLUMNS
        ).to_csv(path, index=False)
        written.append(path)

    path = d / "critical_timing.csv"
    critical_timing_points(results, line_ids).to_csv(path, index=False)
    written.append(path)
    return written
