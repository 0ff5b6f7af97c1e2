import numpy as np
import pytest
from scipy import stats

from app.errors import InvariantViolation, MissingCurve, ParseError, UnknownComponent
from app.grid.components import ComponentClass
from app.grid.synthetic import solar_heavy
from app.simulation.streams import substream_uniforms
from app.vulnerability.damage import DamageState, update_damage
from app.vulnerability.fragility import DEFAULT_CURVES, FragilityCurve, load_fragility, write_fragility
from app.vulnerability.generation import WIND_CUT_OUT_SPEED, available_generation, distributed_solar_tally
from app.vulnerability.resistance import preset_resistance_rank, sample_resistances
from helpers import make_exposure, mixed_grid, sharp_curves


def test_resistance_at_half_is_the_median():
    curve = FragilityCurve(ComponentClass.TRANSMISSION_LINE, 55.0, 0.25)
    assert float(curve.resistance(0.5)) == pytest.approx(55.0)
    assert float(curve.failure_probability(55.0)) == pytest.approx(0.5)


def test_resistance_is_monotone_and_finite_at_the_edges():
    curve = FragilityCurve(ComponentClass.DISTRIBUTION_FEEDER, 38.0, 0.3)
    r = curve.resistance(np.array([0.0, 0.1, 0.5, 0.9, 1.0]))
    assert np.all(np.diff(r) > 0)
    assert np.all(np.isfinite(r)) and np.all(r > 0)


def test_sampled_resistances_follow_the_lognormal_curve():
    curve = FragilityCurve(ComponentClass.TRANSMISSION_LINE, 55.0, 0.25)
    samples = curve.resistance(substream_uniforms(7, "ks", 2000))
    result = stats.kstest(samples, stats.lognorm(s=0.25, scale=55.0).cdf)
    assert result.pvalue > 0.01


def test_curve_needs_positive_parameters():
    with pytest.raises(InvariantViolation):
        FragilityCurve(ComponentClass.TRANSMISSION_LINE, 55.0, 0.0)


def test_fragility_table_round_trip(tmp_path):
    write_fragility(DEFAULT_CURVES, tmp_path / "fragility.csv")
    assert load_fragility(tmp_path / "fragility.csv") == DEFAULT_CURVES


def test_fragility_table_rejects_unknown_class(tmp_path):
    path = tmp_path / "fragility.csv"
    path.write_text("class,median_ms,beta\ntransmission_line,55,0.25\nsubstation,70,0.2\n", encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        load_fragility(path)
    assert exc.value.row == 2


def test_resistances_are_seeded_per_component():
    grid = mixed_grid()
    a = sample_resistances(grid, DEFAULT_CURVES, seed=11)
    b = sample_resistances(grid, DEFAULT_CURVES, seed=11)
    c = sample_resistances(grid, DEFAULT_CURVES, seed=12)
    assert a.as_dict() == b.as_dict()
    assert a.as_dict() != c.as_dict()
    assert a.component_ids == ("tie", "f1", "pv", "btm:f1")


def test_line_resistance_is_the_weakest_of_line_and_towers():
    grid = mixed_grid()
    assignment = sample_resistances(grid, DEFAULT_CURVES, seed=3)
    i = assignment.index["tie"]
    draws = assignment.draws[i]
    line = float(DEFAULT_CURVES[ComponentClass.TRANSMISSION_LINE].resistance(draws[0]))
    towers = DEFAULT_CURVES[ComponentClass.TRANSMISSION_TOWER].resistance(draws[1:])
    assert len(draws) == 1 + assignment.components[i].towers
    assert assignment.of("tie") == pytest.approx(min(line, float(towers.min())))


def test_missing_curve_is_reported():
    curves = dict(DEFAULT_CURVES)
    del curves[ComponentClass.TRANSMISSION_TOWER]
    with pytest.raises(MissingCurve) as exc:
        sample_resistances(mixed_grid(), curves, seed=1)
    assert exc.value.component_class == "transmission_tower"


def test_preset_rank_pins_one_component():
    grid = mixed_grid()
    base = sample_resistances(grid, DEFAULT_CURVES, seed=5)
    pinned = preset_resistance_rank(base, "tie", 0.5)
    # line median 55 and tower median 60 at the median rank
    assert pinned.of("tie") == pytest.approx(55.0)
    for cid in ("f1", "pv", "btm:f1"):
        assert pinned.of(cid) == base.of(cid)


def test_preset_rank_of_unknown_component():
    base = sample_resistances(mixed_grid(), DEFAULT_CURVES, seed=5)
    with pytest.raises(UnknownComponent):
        preset_resistance_rank(base, "nope", 0.5)
    with pytest.raises(UnknownComponent):
        base.of("nope")


def test_damage_is_absorbing():
    grid = mixed_grid()
    assignment = sample_resistances(grid, sharp_curves(line_median=40.0), seed=1)
    state = DamageState.intact(assignment.component_ids)

    state = update_damage(state, assignment, np.array([10.0, 0.0, 0.0, 0.0]), 0)
    assert state.failed_ids() == set()
    state = update_damage(state, assignment, np.array([45.0, 0.0, 0.0, 0.0]), 1)
    assert state.failed_ids() == {"tie"}
    assert state.failed_at(1) == ["tie"]
    state = update_damage(state, assignment, np.array([0.0, 0.0, 0.0, 0.0]), 2)
    assert state.is_failed("tie")
    assert state.failed_at(2) == []


def test_damage_rejects_mismatched_components():
    assignment = sample_resistances(mixed_grid(), DEFAULT_CURVES, seed=1)
    with pytest.raises(InvariantViolation):
        update_damage(DamageState.intact(("x",)), assignment, np.zeros(1), 0)


def test_available_generation_under_the_storm():
    grid = mixed_grid()
    exposure = make_exposure(grid, 2, turbine_winds={"wt": {1: WIND_CUT_OUT_SPEED + 1.0}}, solar=0.5)
    state = DamageState.intact(exposure.component_ids)

    calm = available_generation(grid, state, exposure, 0)
    assert calm == {"th": 200.0, "hy": 50.0, "pv": 20.0, "wt": 30.0, "btm:f1": 10.0}

    windy = available_generation(grid, state, exposure, 1)
    assert windy["wt"] == 0.0

    dead = available_generation(grid, state, exposure, 0, dead_buses=frozenset({"G"}))
    assert dead["th"] == dead["hy"] == dead["pv"] == 0.0
    assert dead["wt"] == 30.0


def test_btm_output_goes_with_its_feeder():
    grid = mixed_grid()
    exposure = make_exposure(grid, 1, solar=1.0)
    failed = np.full(len(exposure.component_ids), -1)
    failed[exposure.component_col["f1"]] = 0
    state = DamageState(exposure.component_ids, failed)
    avail = available_generation(grid, state, exposure, 0)
    assert avail["btm:f1"] == 0.0

    tally = distributed_solar_tally(grid, avail, exposure, 0)
    assert tally.actual_mw == 0.0
    assert tally.clear_sky_mw == pytest.approx(20.0)
    assert tally.ratio == 0.0


def test_solar_tally_in_the_dark():
    grid = mixed_grid()
    exposure = make_exposure(grid, 1, solar=0.0)
    state = DamageState.intact(exposure.component_ids)
    tally = distributed_solar_tally(grid, available_generation(grid, state, exposure, 0), exposure, 0)
    assert tally.clear_sky_mw == 0.0
    assert tally.ratio == 1.0


def test_stronger_winds_fail_a_superset_of_components():
    grid = solar_heavy()
    rng = np.random.default_rng(4)
    for seed in range(40):
        assignment = sample_resistances(grid, DEFAULT_CURVES, seed)
        winds = rng.uniform(0.0, 70.0, size=(12, len(assignment.component_ids)))
        k = float(rng.uniform(1.0, 1.5))
        base = stronger = DamageState.intact(assignment.component_ids)
        for step, w in enumerate(winds):
            base = update_damage(base, assignment, w, step)
            stronger = update_damage(stronger, assignment, k * w, step)
            assert base.failed_ids() <= stronger.failed_ids()
        # and never later
        assert np.all(stronger.failure_step[base.failed] <= base.failure_step[base.failed])
