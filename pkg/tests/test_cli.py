import json

import pandas as pd
import pytest

from app.commands.common import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME
from app.config import settings
from app.main import main
from app.simulation.streams import realization_seed


def test_validate_clean_testbed(capsys, toy_testbed):
    assert main(["validate", str(toy_testbed)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] is True
    assert report["errors"] == []
    assert len(report["config_hash"]) == 64


def test_validate_reports_missing_inputs(capsys, toy_testbed):
    (toy_testbed.parent / "grid" / "lines.csv").unlink()
    assert main(["validate", str(toy_testbed)]) == EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] is False
    assert "missing_file" in {e["code"] for e in report["errors"]}


def test_validate_unreadable_config(capsys, tmp_path):
    assert main(["validate", str(tmp_path / "nope.json")]) == EXIT_INVALID
    report = json.loads(capsys.readouterr().out)
    assert report["errors"][0]["code"] == "missing_file"


def test_defaults_json(capsys):
    assert main(["defaults", "--format", "json"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)
    assert "wind.gust_factor" in {r["key"] for r in rows}


def test_testbed_command_prints_the_config_path(capsys, tmp_path):
    assert main(["testbed", str(tmp_path / "tb"), "--kind", "toy_radial", "--n", "2"]) == EXIT_OK
    path = capsys.readouterr().out.strip()
    assert path.endswith("config.json")
    assert (tmp_path / "tb" / "grid" / "buses.csv").exists()
    assert (tmp_path / "tb" / "provenance.json").exists()


def test_simulate_writes_one_realization(tmp_path, toy_testbed):
    out = tmp_path / "sim"
    lp = tmp_path / "lp"
    assert main(["simulate", str(toy_testbed), "--out", str(out), "--dump-lp", str(lp)]) == EXIT_OK

    trajectory = pd.read_csv(out / "trajectory.csv")
    assert len(trajectory) == 139
    assert trajectory["performance"].between(0.0, 1.0).all()
    assert (out / "events.csv").exists()
    provenance = json.loads((out / "provenance.json").read_text())
    assert provenance["command"] == "simulate"
    assert provenance["seed"] == realization_seed(20000920, 0)
    assert (lp / "r000000_init_G.lp").exists()


def test_simulate_is_reproducible(tmp_path, toy_testbed):
    for name in ("a", "b"):
        assert main(["simulate", str(toy_testbed), "--seed", "11", "--out", str(tmp_path / name)]) == EXIT_OK
    assert (tmp_path / "a" / "trajectory.csv").read_text() == (tmp_path / "b" / "trajectory.csv").read_text()
    assert (tmp_path / "a" / "events.csv").read_text() == (tmp_path / "b" / "events.csv").read_text()


def test_ensemble_then_metrics(tmp_path, toy_testbed):
    ens = tmp_path / "ens"
    assert main(["ensemble", str(toy_testbed), "--n", "2", "--out", str(ens)]) == EXIT_OK
    manifest = json.loads((ens / "manifest.json").read_text())
    assert [r["index"] for r in manifest["realizations"]] == [0, 1]
    summary = json.loads((ens / "summary.json").read_text())
    assert summary["n"] == 2
    assert len(summary["quantiles"]["p50"]) == 139

    again = tmp_path / "again"
    assert main(["metrics", str(ens), "--out", str(again)]) == EXIT_OK
    assert json.loads((again / "summary.json").read_text()) == summary
    for name in ("points_resilient.csv", "points_vulnerable.csv", "critical_timing.csv"):
        assert (again / name).read_text() == (ens / name).read_text()


def test_worker_count_does_not_change_the_summary(monkeypatch, tmp_path, toy_testbed):
    # one realization per chunk so eight workers really share the run
    monkeypatch.setattr(settings, "chunk_size", 1)
    for workers in ("1", "8"):
        out = tmp_path / f"w{workers}"
        assert main(["ensemble", str(toy_testbed), "--n", "4", "--workers", workers, "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "w1" / "summary.json").read_text() == (tmp_path / "w8" / "summary.json").read_text()


def test_compare_single_realization(tmp_path, toy_testbed):
    observed = tmp_path / "observed.csv"
    observed.write_text(
        "time_iso8601,region,pct_with_power\n"
        "2000-09-20T00:00:00Z,all,100\n"
        "2000-09-20T12:00:00Z,all,40\n"
    )
    out = tmp_path / "cmp"
    assert main(["compare", str(toy_testbed), "--observed", str(observed), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "comparison.json").read_text())
    assert [s["step"] for s in report["steps"]] == [0, 72]


def test_compare_without_observed_data_is_a_config_error(tmp_path, toy_testbed):
    assert main(["compare", str(toy_testbed), "--out", str(tmp_path / "cmp")]) == EXIT_RUNTIME


def test_preset_command(tmp_path, toy_testbed):
    out = tmp_path / "preset"
    assert main(["preset", str(toy_testbed), "--n", "2", "--ranks", "0.5", "--out", str(out)]) == EXIT_OK
    table = pd.read_csv(out / "preset.csv")
    assert table["component"].tolist() == ["tie", "tie"]
    assert table["rank"].astype(str).tolist() == ["baseline", "0.5"]


@pytest.mark.parametrize("ranks", ["0", "x"])
def test_preset_rejects_bad_ranks(tmp_path, toy_testbed, ranks):
    assert main(["preset", str(toy_testbed), "--n", "1", "--ranks", ranks, "--out", str(tmp_path)]) == EXIT_RUNTIME


def test_sweep_command(tmp_path, toy_testbed):
    out = tmp_path / "sweep"
    assert main(["sweep", str(toy_testbed), "--levels", "0.1,0.3", "--n", "2", "--out", str(out)]) == EXIT_OK
    table = pd.read_csv(out / "sweep.csv")
    assert table["level"].tolist() == [0.1, 0.3]
    assert (out / "level_0.100" / "summary.json").exists()
    assert (out / "level_0.300" / "summary.json").exists()
