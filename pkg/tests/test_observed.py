from datetime import timedelta

import pytest

from app.errors import MisalignedTimeGrid, MissingFile, ParseError
from app.grid.synthetic import EVENT_DAY
from app.schemas.results import EnsembleSummary
from app.services.observed import compare_observed, load_observed, write_comparison
from app.simulation.horizon import Horizon
from helpers import realization

HORIZON = Horizon(EVENT_DAY, EVENT_DAY + timedelta(minutes=30), 10.0)


def write_observed(tmp_path, rows: list[str]):
    path = tmp_path / "observed.csv"
    path.write_text("\n".join(["time_iso8601,region,pct_with_power", *rows]) + "\n")
    return path


def summary() -> EnsembleSummary:
    return EnsembleSummary(
        config_hash="abc",
        n=4,
        times=[t.strftime("%Y-%m-%dT%H:%M:%SZ") for t in HORIZON.times],
        blackout_probability=1.0,
        blackout_histogram=[0, 0, 2, 2],
        median_blackout_step=2.5,
        resilient_count=0,
        vulnerable_count=4,
        critical_index={},
        quantiles={
            "p05": [1.0, 0.5, 0.0, 0.0],
            "p25": [1.0, 0.7, 0.2, 0.0],
            "p50": [1.0, 0.8, 0.4, 0.0],
            "p75": [1.0, 0.9, 0.6, 0.2],
            "p95": [1.0, 1.0, 0.8, 0.5],
        },
        mean_final_performance=0.0,
        stderr_final_performance=0.0,
        region_median_performance={"north": [1.0, 0.5, 0.5, 0.5]},
    )


AGGREGATE_ROWS = [
    "2000-09-20T00:00:00Z,all,100",
    "2000-09-20T00:10:00Z,all,85",
    "2000-09-20T00:20:00Z,all,10",
    "2000-09-20T00:30:00Z,all,0",
]


def test_compare_against_ensemble_bands(tmp_path):
    observed = load_observed(write_observed(tmp_path, AGGREGATE_ROWS))
    report = compare_observed(summary(), observed, HORIZON, "abc")

    assert [s.step for s in report.steps] == [0, 1, 2, 3]
    assert report.coverage_50 == 0.75
    assert report.coverage_90 == 1.0
    assert report.max_abs_deviation == pytest.approx(0.3)
    assert report.steps[1].deviation == pytest.approx(0.05)
    assert report.observed_blackout_step == 3
    assert report.observed_blackout_quantile == 1.0
    assert report.observed_blackout_in_support is True

    written = write_comparison(report, tmp_path / "cmp")
    assert [p.name for p in written] == ["comparison.json", "comparison.csv"]


def test_regional_comparison_uses_the_regional_median(tmp_path):
    rows = ["2000-09-20T00:10:00Z,north,50", "2000-09-20T00:20:00Z,north,60"]
    report = compare_observed(summary(), load_observed(write_observed(tmp_path, rows)), HORIZON, "abc", region="north")
    assert [s.p50 for s in report.steps] == [0.5, 0.5]
    assert report.steps[0].p05 == report.steps[0].p95 == 0.5
    assert report.observed_blackout_step is None
    assert report.observed_blackout_quantile is None

    with pytest.raises(MisalignedTimeGrid):
        compare_observed(summary(), load_observed(write_observed(tmp_path, rows)), HORIZON, "abc", region="south")


def test_aggregate_falls_back_to_mean_of_regions(tmp_path):
    rows = ["2000-09-20T00:00:00Z,north,100", "2000-09-20T00:00:00Z,south,50"]
    observed = load_observed(write_observed(tmp_path, rows))
    assert observed.curve() == ((EVENT_DAY, 75.0),)


def test_compare_against_a_single_realization(tmp_path):
    observed = load_observed(write_observed(tmp_path, AGGREGATE_ROWS))
    result = realization(0, [1.0, 0.8, 0.0, 0.0])
    report = compare_observed(result, observed, HORIZON, "abc")
    assert report.steps[2].p05 == report.steps[2].p95 == 0.0
    assert report.observed_blackout_step == 3
    assert report.observed_blackout_quantile == 1.0
    assert report.observed_blackout_in_support is False


def test_off_grid_times_are_rejected(tmp_path):
    for stamp in ("2000-09-20T00:05:00Z", "2000-09-21T00:00:00Z"):
        observed = load_observed(write_observed(tmp_path, [f"{stamp},all,90"]))
        with pytest.raises(MisalignedTimeGrid):
            compare_observed(summary(), observed, HORIZON, "abc")


def test_naive_timestamps_are_utc(tmp_path):
    observed = load_observed(write_observed(tmp_path, ["2000-09-20T00:10:00,all,90"]))
    assert observed.curve() == ((EVENT_DAY + timedelta(minutes=10), 90.0),)


def test_bad_percentages_and_duplicates(tmp_path):
    with pytest.raises(ParseError) as err:
        load_observed(write_observed(tmp_path, ["2000-09-20T00:00:00Z,all,101"]))
    assert (err.value.row, err.value.column) == (1, "pct_with_power")

    with pytest.raises(ParseError) as err:
        load_observed(write_observed(tmp_path, AGGREGATE_ROWS[:1] * 2))
    assert err.value.row == 2

    with pytest.raises(ParseError):
        load_observed(write_observed(tmp_path, ["yesterday,all,50"]))


def test_empty_and_missing_files(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    observed = load_observed(empty)
    assert observed.series == {}
    with pytest.raises(MisalignedTimeGrid):
        compare_observed(summary(), observed, HORIZON, "abc")
    with pytest.raises(MissingFile):
        load_observed(tmp_path / "absent.csv")
