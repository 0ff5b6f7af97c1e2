from pathlib import Path

import pytest

from app.errors import DanglingReference, InfeasibleTarget, InvariantViolation, MissingFile, ParseError
from app.grid.base import BTM_PREFIX, GeneratorKind
from app.grid.components import ComponentClass, fragile_components, tower_count
from app.grid.loader import GridPaths, load_grid, validate_grid, write_grid
from app.grid.scaling import integration_level, scale_renewable_integration
from app.grid.synthetic import BASELINE_INTEGRATION, TESTBED_DIURNAL, _event_horizon, solar_heavy
from helpers import mixed_grid

BUSES = "id,name,lat,lon,kv,region\nG,gen,18.0,-66.6,230,south\nL,load,18.1,-66.5,230,north\n"
LINES = "id,from,to,x_pu,rating_mw,emergency_mw,geometry_wkt\ntie,G,L,0.05,200,240,\"LINESTRING (-66.6 18.0, -66.5 18.1)\"\n"
GENERATORS = (
    "id,bus,kind,p_max_mw,p_min_mw,ramp_mw_min,h_s,cost,available\n"
    "g1,G,thermal,150,10,5,5,,true\n"
    "pv,G,utility_solar,20,0,0,0,1,true\n"
)
FEEDERS = (
    "id,bus,peak_mw,customers,btm_mw,geometry_wkt,shape_id\n"
    "f1,L,80,1000,5,\"LINESTRING (-66.5 18.1, -66.49 18.12)\",res\n"
    "f2,L,40,,0,\"POINT (-66.5 18.1)\",\n"
)
SHAPES = "shape_id,step,multiplier\nres,0,1.0\nres,1,0.5\n"


def write_tables(d: Path, **override) -> GridPaths:
    tables = {"buses": BUSES, "lines": LINES, "generators": GENERATORS, "feeders": FEEDERS, "shapes": SHAPES}
    tables.update(override)
    d.mkdir(parents=True, exist_ok=True)
    for name, text in tables.items():
        (d / f"{name}.csv").write_text(text, encoding="utf-8")
    return GridPaths.from_dir(d)


def test_load_grid_tables(tmp_path):
    grid = load_grid(write_tables(tmp_path))

    assert [b.id for b in grid.buses] == ["G", "L"]
    assert grid.regions == ("north", "south")
    tie = grid.line_by_id["tie"]
    assert (tie.rating, tie.emergency_rating) == (200.0, 240.0)
    assert tie.span_points == ((18.0, -66.6), (18.1, -66.5))
    # blank cost falls back to the kind default
    assert grid.generator_by_id["g1"].marginal_cost == 50.0
    f1 = grid.feeder_by_id["f1"]
    assert f1.demand_shape == (1.0, 0.5)
    assert f1.demand(1) == 40.0
    assert f1.demand(10) == 40.0  # last multiplier holds
    assert grid.feeder_by_id["f2"].route_points == ((18.1, -66.5),)


def test_missing_customers_are_imputed_from_known_feeders(tmp_path):
    grid = load_grid(write_tables(tmp_path))
    # f1 has 1000 customers on 80 MW; f2 (40 MW) gets the same density
    assert grid.feeder_by_id["f2"].customers == 500


def test_customers_per_mw_override(tmp_path):
    grid = load_grid(write_tables(tmp_path), customers_per_mw=10.0)
    assert grid.feeder_by_id["f2"].customers == 400
    assert grid.feeder_by_id["f1"].customers == 1000


def test_btm_units_are_derived_per_feeder(tmp_path):
    grid = load_grid(write_tables(tmp_path))
    btm = grid.generator_by_id[f"{BTM_PREFIX}f1"]
    assert btm.kind == GeneratorKind.BTM_SOLAR
    assert btm.p_max == 5.0
    assert btm.bus == "L"
    assert len(grid.all_generators) == len(grid.generators) + len(grid.feeders)


def test_missing_table_raises(tmp_path):
    paths = write_tables(tmp_path)
    paths.lines.unlink()
    with pytest.raises(MissingFile):
        load_grid(paths)


def test_bad_number_reports_row_and_column(tmp_path):
    lines = LINES.replace("0.05,200", "0.05,lots")
    with pytest.raises(ParseError) as exc:
        load_grid(write_tables(tmp_path, lines=lines))
    assert exc.value.row == 1
    assert exc.value.column == "rating_mw"


def test_unknown_generator_kind(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_grid(write_tables(tmp_path, generators=GENERATORS.replace("utility_solar", "fusion")))
    assert exc.value.row == 2
    assert exc.value.column == "kind"


def test_dangling_bus_reference(tmp_path):
    with pytest.raises(DanglingReference) as exc:
        load_grid(write_tables(tmp_path, lines=LINES.replace("tie,G,L", "tie,G,X")))
    assert exc.value.ref == "X"


def test_dangling_shape_reference(tmp_path):
    with pytest.raises(DanglingReference):
        load_grid(write_tables(tmp_path, shapes="shape_id,step,multiplier\nother,0,1.0\n"))


def test_rating_above_emergency_is_rejected(tmp_path):
    with pytest.raises(InvariantViolation):
        load_grid(write_tables(tmp_path, lines=LINES.replace("200,240", "300,240")))


def test_grid_without_inertia_is_rejected(tmp_path):
    generators = "id,bus,kind,p_max_mw,p_min_mw,ramp_mw_min,h_s,cost,available\npv,G,utility_solar,20,0,0,0,1,true\n"
    with pytest.raises(InvariantViolation):
        load_grid(write_tables(tmp_path, generators=generators))


def test_write_then_load_keeps_the_model(tmp_path, toy_grid):
    loaded = load_grid(write_grid(toy_grid, tmp_path / "grid"))
    assert loaded.generators == toy_grid.generators
    assert [(ln.id, ln.from_bus, ln.to_bus, ln.reactance, ln.rating) for ln in loaded.lines] == [
        (ln.id, ln.from_bus, ln.to_bus, ln.reactance, ln.rating) for ln in toy_grid.lines
    ]
    assert [(f.id, f.customers, f.peak_demand) for f in loaded.feeders] == [
        (f.id, f.customers, f.peak_demand) for f in toy_grid.feeders
    ]


def test_written_demand_shapes_survive(tmp_path):
    grid = solar_heavy()
    loaded = load_grid(write_grid(grid, tmp_path / "grid"))
    assert loaded.feeders[0].demand_shape == grid.feeders[0].demand_shape
    assert len(loaded.lines) == 47


def test_fragile_components_order_and_classes():
    grid = mixed_grid()
    components = fragile_components(grid)
    assert [c.id for c in components] == ["tie", "f1", "pv", "btm:f1"]
    assert [c.component_class for c in components] == [
        ComponentClass.TRANSMISSION_LINE,
        ComponentClass.DISTRIBUTION_FEEDER,
        ComponentClass.UTILITY_SOLAR,
        ComponentClass.ROOFTOP_SOLAR,
    ]
    assert components[0].towers == tower_count(grid.lines[0].span_points)
    assert components[0].towers >= 1


def test_validate_accepts_synthetic_grids(toy_grid):
    validate_grid(toy_grid)
    validate_grid(solar_heavy())


def test_scaling_hits_the_target_level():
    grid = solar_heavy()
    horizon = _event_horizon()
    assert integration_level(grid, horizon, TESTBED_DIURNAL) == pytest.approx(BASELINE_INTEGRATION)

    scaled = scale_renewable_integration(grid, 0.5, horizon, TESTBED_DIURNAL)
    assert integration_level(scaled, horizon, TESTBED_DIURNAL) == pytest.approx(0.5)
    # capacity goes where the demand energy is; equal feeders get equal shares
    capacities = {round(f.btm_solar_capacity, 9) for f in scaled.feeders}
    assert len(capacities) == 1
    # the rest of the grid is untouched
    assert scaled.lines == grid.lines
    assert scaled.generators == grid.generators


def test_scaling_at_current_level_returns_same_grid():
    grid = solar_heavy()
    horizon = _event_horizon()
    level = integration_level(grid, horizon, TESTBED_DIURNAL)
    assert scale_renewable_integration(grid, level, horizon, TESTBED_DIURNAL) is grid


@pytest.mark.parametrize("level", [0.0, 0.01, 0.96, 1.5])
def test_scaling_rejects_out_of_range_levels(level):
    with pytest.raises(InfeasibleTarget):
        scale_renewable_integration(solar_heavy(), level, _event_horizon(), TESTBED_DIURNAL)
