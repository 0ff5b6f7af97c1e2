import pandas as pd
import pytest

from app.services.metrics import (
    blackout_histogram,
    blackout_probability,
    critical_index,
    critical_timing_points,
    final_performance_stats,
    mean_solar_ratio,
    median_blackout_step,
    partition_resilient_vulnerable,
    performance_quantiles,
    region_medians,
    summarize,
    write_summary_artifacts,
)
from helpers import realization

TIMES = ["2000-09-20T00:00:00Z", "2000-09-20T00:10:00Z", "2000-09-20T00:20:00Z", "2000-09-20T00:30:00Z"]


@pytest.fixture
def results():
    return [
        realization(0, [1.0, 1.0, 1.0, 1.0]),
        realization(1, [1.0, 0.5, 0.0, 0.0], lines={"a": 1, "b": 2}),
        realization(2, [1.0, 1.0, 0.6, 0.0], lines={"a": 3}),
        realization(3, [1.0, 0.9, 0.9, 0.9], lines={"b": 1}),
    ]


def test_blackout_probability_uses_the_requested_size(results):
    assert blackout_probability(results) == 0.5
    # a failed fifth realization still counts in the denominator
    assert blackout_probability(results, 5) == pytest.approx(0.4)
    assert blackout_probability([], 0) == 0.0


def test_blackout_timing(results):
    assert blackout_histogram(results, 4) == [0, 0, 1, 1]
    assert median_blackout_step(results) == 2.5
    assert median_blackout_step(results[:1]) is None


def test_critical_index_counts_failures_at_the_blackout_step(results):
    index = critical_index(results, ["a", "b", "c"])
    # a failed at the blackout step only in realization 2, b only in realization 1
    assert index == {"a": 0.25, "b": 0.25, "c": 0.0}


def test_partition_carries_largest_failure_points(results):
    part = partition_resilient_vulnerable(list(reversed(results)))
    assert part.resilient == [0, 3]
    assert part.vulnerable == [1, 2]
    assert [(p.step, p.performance, p.drop) for p in part.resilient_points] == [
        (0, 1.0, 0.0),
        (1, 0.9, pytest.approx(0.1)),
    ]
    assert [(p.step, p.performance, p.drop) for p in part.vulnerable_points] == [
        (1, 0.5, 0.5),
        (3, 0.0, pytest.approx(0.6)),
    ]


def test_performance_quantiles(results):
    q = performance_quantiles(results)
    assert sorted(q) == ["p05", "p25", "p50", "p75", "p95"]
    assert q["p50"][0] == 1.0
    assert q["p50"][1] == pytest.approx(0.95)
    assert all(lo <= hi for lo, hi in zip(q["p05"], q["p95"]))
    assert performance_quantiles([])["p50"] == []


def test_final_performance_stats(results):
    mean, stderr = final_performance_stats(results)
    assert mean == pytest.approx(0.475)
    assert stderr == pytest.approx(0.275)
    assert final_performance_stats(results[:1]) == (1.0, 0.0)


def test_region_medians_and_solar_ratio():
    rs = [
        realization(0, [1.0, 1.0], regions={"north": [1.0, 0.2]}, solar=([5.0, 0.0], [10.0, 0.0])),
        realization(1, [1.0, 1.0], regions={"north": [1.0, 0.6]}, solar=([10.0, 0.0], [10.0, 0.0])),
    ]
    assert region_medians(rs) == {"north": [1.0, pytest.approx(0.4)]}
    assert mean_solar_ratio(rs) == [pytest.approx(0.75), 1.0]
    assert mean_solar_ratio([realization(0, [1.0])]) == []


def test_summarize_reports_failures(results):
    summary = summarize(results, 5, "abc", TIMES, ["a", "b"], failed_indices=[4])
    assert summary.n == 5
    assert summary.failed_count == 1
    assert summary.failed_indices == [4]
    assert summary.blackout_probability == pytest.approx(0.4)
    assert (summary.resilient_count, summary.vulnerable_count) == (2, 2)
    assert summary.critical_index == {"a": 0.2, "b": 0.2}
    assert summary.median_blackout_step == 2.5


def test_summarize_with_no_successful_realizations():
    summary = summarize([], 3, "abc", TIMES, ["a"], failed_indices=[2, 0, 1])
    assert summary.failed_indices == [0, 1, 2]
    assert summary.blackout_probability == 0.0
    assert summary.blackout_histogram == [0, 0, 0, 0]
    assert summary.quantiles["p50"] == []


def test_summary_artifacts(tmp_path, results):
    summary = summarize(results, 4, "abc", TIMES, ["a", "b"])
    written = write_summary_artifacts(summary, results, ["a", "b"], tmp_path)
    assert [p.name for p in written] == [
        "summary.json",
        "points_resilient.csv",
        "points_vulnerable.csv",
        "critical_timing.csv",
    ]
    vulnerable = pd.read_csv(tmp_path / "points_vulnerable.csv")
    assert vulnerable["step"].tolist() == [1, 3]

    timing = critical_timing_points(results, ["a", "b"])
    assert timing.values.tolist() == [
        ["a", 1, 1, True],
        ["b", 1, 2, True],
        ["a", 2, 3, True],
        ["b", 3, 1, False],
    ]
