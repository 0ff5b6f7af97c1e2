import math
from dataclasses import replace

import numpy as np
import pytest

from app.errors import SingularSystem
from app.grid.base import Bus, Feeder, Generator, GeneratorKind, GridModel, Line
from app.network.cascade import TripRule, balanced_injections, cascade
from app.network.powerflow import dc_power_flow
from app.network.stability import max_rocof, stability_screen, synchronous_inertia
from app.network.subgrids import SubGrid, Topology, find_subgrids
from helpers import parallel_grid, random_grid


def triangle_grid() -> GridModel:
    buses = tuple(Bus(b, b, 18.0 + 0.01 * i, -66.0, 115.0) for i, b in enumerate("ABC"))
    pts = {b.id: b.point for b in buses}
    lines = (
        Line("ab", "A", "B", 0.1, 100.0, 100.0, (pts["A"], pts["B"])),
        Line("bc", "B", "C", 0.1, 100.0, 100.0, (pts["B"], pts["C"])),
        Line("ac", "A", "C", 0.1, 100.0, 100.0, (pts["A"], pts["C"])),
    )
    return GridModel(
        buses=buses,
        lines=lines,
        generators=(Generator("g", "A", GeneratorKind.THERMAL, 200.0, 0.0, 5.0, 5.0, 50.0),),
        feeders=(Feeder("f", "C", 90.0, 100, 0.0, (pts["C"],)),),
    )


def test_triangle_flows():
    grid = triangle_grid()
    (sub,) = find_subgrids(grid, Topology())
    solution = dc_power_flow(grid, sub, {"A": 90.0, "C": -90.0})
    assert solution.flows["ac"] == pytest.approx(60.0)
    assert solution.flows["ab"] == pytest.approx(30.0)
    assert solution.flows["bc"] == pytest.approx(30.0)
    assert solution.angles[sub.slack] == 0.0
    assert all(abs(r) < 1e-9 for r in solution.residuals(grid).values())


def test_slack_takes_up_the_residual():
    grid = triangle_grid()
    (sub,) = find_subgrids(grid, Topology())
    solution = dc_power_flow(grid, sub, {"A": 50.0, "C": -90.0})
    assert solution.injections["A"] == pytest.approx(90.0)


def test_singular_subgrid_is_reported():
    grid = triangle_grid()
    # a sub-grid claiming buses its lines do not connect
    sub = SubGrid(buses=("A", "B", "C"), lines=("ab",), generators=("g",), feeders=("f",), slack="A", functional=True)
    with pytest.raises(SingularSystem):
        dc_power_flow(grid, sub, {"A": 90.0, "C": -90.0})


def test_subgrids_after_line_outage():
    grid = parallel_grid()
    (whole,) = find_subgrids(grid, Topology())
    assert whole.functional
    assert whole.slack == "A"
    assert whole.lines == ("l1", "l2", "l3")

    parts = find_subgrids(grid, Topology(out_lines=frozenset({"l1", "l2", "l3"})))
    assert [p.buses for p in parts] == [("A",), ("B",)]
    assert not any(p.functional for p in parts)
    assert parts[0].generators == ("g1",)
    assert parts[1].feeders == ("f1",)


def test_dead_buses_and_failed_feeders_drop_out():
    grid = parallel_grid()
    (only,) = find_subgrids(grid, Topology(dead_buses=frozenset({"B"})))
    assert only.buses == ("A",)
    (sub,) = find_subgrids(grid, Topology(failed_feeders=frozenset({"f1"})))
    assert not sub.functional


def test_balanced_injections_scale_the_larger_side():
    grid = parallel_grid()
    (sub,) = find_subgrids(grid, Topology())
    assert balanced_injections(sub, {"A": 120.0}, {"B": 90.0}) == pytest.approx({"A": 90.0, "B": -90.0})
    assert balanced_injections(sub, {"A": 60.0}, {"B": 90.0}) == pytest.approx({"A": 60.0, "B": -60.0})


def test_parallel_lines_share_without_tripping():
    grid = parallel_grid(emergency=40.0)
    result = cascade(grid, Topology(), {"A": 90.0}, {"B": 90.0})
    assert result.trips == []
    assert result.iterations == 1
    assert [result.flows[lid] for lid in ("l1", "l2", "l3")] == pytest.approx([30.0, 30.0, 30.0])


def test_losing_one_parallel_line_cascades():
    grid = parallel_grid(emergency=40.0)
    result = cascade(grid, Topology(out_lines=frozenset({"l3"})), {"A": 90.0}, {"B": 90.0})
    assert sorted(t.line_id for t in result.trips) == ["l1", "l2"]
    assert all(t.iteration == 0 for t in result.trips)
    assert all(abs(t.flow) == pytest.approx(45.0) for t in result.trips)
    # the pass after the trips finds no line left to solve
    assert result.iterations == 1
    assert result.topology.out_lines == frozenset({"l1", "l2", "l3"})
    assert not any(s.functional for s in result.subgrids)


def test_random_trip_between_ratings_is_seeded():
    grid = GridModel(
        buses=parallel_grid().buses,
        lines=tuple(Line(ln.id, ln.from_bus, ln.to_bus, ln.reactance, 25.0, 50.0, ln.span_points) for ln in parallel_grid().lines),
        generators=parallel_grid().generators,
        feeders=parallel_grid().feeders,
    )
    never = cascade(grid, Topology(), {"A": 90.0}, {"B": 90.0}, TripRule(0.0, seed=1, step=0))
    always = cascade(grid, Topology(), {"A": 90.0}, {"B": 90.0}, TripRule(1.0, seed=1, step=0))
    assert never.trips == []
    assert sorted(t.line_id for t in always.trips) == ["l1", "l2", "l3"]

    rule = TripRule(0.5, seed=9, step=4)
    first = cascade(grid, Topology(), {"A": 90.0}, {"B": 90.0}, rule)
    again = cascade(grid, Topology(), {"A": 90.0}, {"B": 90.0}, rule)
    assert first.trips == again.trips


def test_rocof_worked_case():
    grid = GridModel(
        buses=(Bus("A", "a", 18.0, -66.0, 115.0),),
        lines=(),
        generators=(Generator("g", "A", GeneratorKind.THERMAL, 230.0, 0.0, 5.0, 5.0, 50.0),),
        feeders=(Feeder("f", "A", 100.0, 100, 0.0, ((18.0, -66.0),)),),
    )
    (sub,) = find_subgrids(grid, Topology())
    surviving, removed, verdicts = stability_screen(grid, (sub,), {"g": 70.0}, {"f": 100.0}, frozenset({"g"}), 2.0)
    assert verdicts[0].imbalance == pytest.approx(-30.0)
    # 60 Hz * -30 MW / (2 * 5 s * 230 MW)
    assert verdicts[0].rocof == pytest.approx(-0.782609, abs=1e-6)
    assert surviving == [sub] and removed == []

    surviving, removed, _ = stability_screen(grid, (sub,), {"g": 70.0}, {"f": 100.0}, frozenset({"g"}), 0.5)
    assert surviving == [] and removed == [sub]


def test_uncommitted_island_with_imbalance_has_infinite_rocof():
    assert max_rocof(-5.0, 0.0, 60.0) == -math.inf
    assert max_rocof(0.0, 0.0, 60.0) == 0.0


def dense_flows(grid: GridModel, sub: SubGrid, injections: dict[str, float]) -> dict[str, float]:
    buses = list(sub.buses)
    idx = {b: i for i, b in enumerate(buses)}
    b_matrix = np.zeros((len(buses), len(buses)))
    for lid in sub.lines:
        ln = grid.line_by_id[lid]
        f, t, y = idx[ln.from_bus], idx[ln.to_bus], 1.0 / ln.reactance
        b_matrix[f, f] += y
        b_matrix[t, t] += y
        b_matrix[f, t] -= y
        b_matrix[t, f] -= y
    keep = [i for i, b in enumerate(buses) if b != sub.slack]
    p = np.array([injections[b] for b in buses]) / grid.system_base
    theta = np.zeros(len(buses))
    theta[keep] = np.linalg.solve(b_matrix[np.ix_(keep, keep)], p[keep])
    return {
        lid: (theta[idx[grid.line_by_id[lid].from_bus]] - theta[idx[grid.line_by_id[lid].to_bus]])
        / grid.line_by_id[lid].reactance
        * grid.system_base
        for lid in sub.lines
    }


def test_flows_match_a_dense_solve_on_random_networks():
    rng = np.random.default_rng(20)
    for _ in range(200):
        n = int(rng.integers(2, 21))
        grid = random_grid(rng, n, extra_lines=int(rng.integers(0, n + 1)))
        (sub,) = find_subgrids(grid, Topology())
        injections = {b: float(rng.normal(0.0, 100.0)) for b in sub.buses}
        injections[sub.slack] = -(sum(injections.values()) - injections[sub.slack])

        solution = dc_power_flow(grid, sub, injections)
        expected = dense_flows(grid, sub, injections)
        for lid in sub.lines:
            assert abs(solution.flows[lid] - expected[lid]) <= 1e-8
        assert max(abs(r) for r in solution.residuals(grid).values()) <= 1e-9 * grid.system_base


def test_rocof_matches_the_direct_formula_on_random_fleets():
    rng = np.random.default_rng(1)
    kinds = (GeneratorKind.THERMAL, GeneratorKind.HYDRO, GeneratorKind.WIND, GeneratorKind.UTILITY_SOLAR)
    bus = Bus("A", "a", 18.0, -66.0, 115.0)
    for _ in range(1000):
        f0 = float(rng.uniform(45.0, 65.0))
        gens = tuple(
            Generator(
                f"g{i}",
                "A",
                GeneratorKind.THERMAL if i == 0 else kinds[int(rng.integers(0, len(kinds)))],
                float(rng.uniform(1.0, 500.0)),
                0.0,
                1.0,
                float(rng.uniform(0.5, 9.0)),
                10.0,
            )
            for i in range(int(rng.integers(1, 9)))
        )
        committed = frozenset({"g0"} | {g.id for g in gens if rng.random() < 0.7})
        generation = {g.id: float(rng.uniform(0.0, g.p_max)) for g in gens}
        demand = {"f": float(rng.uniform(0.0, 1000.0))}
        grid = GridModel(
            buses=(bus,),
            lines=(),
            generators=gens,
            feeders=(Feeder("f", "A", 1000.0, 100, 0.0, (bus.point,)),),
            frequency=f0,
        )
        sub = SubGrid(buses=("A",), generators=tuple(g.id for g in gens), feeders=("f",), slack="A", functional=True)

        imbalance = sum(generation[g.id] for g in gens) - demand["f"]
        fleet = sum(2.0 * g.inertia * g.p_max for g in gens if g.synchronous and g.id in committed)
        expected = f0 * imbalance / fleet
        _, _, (verdict,) = stability_screen(grid, (sub,), generation, demand, committed, math.inf)
        assert verdict.rocof == pytest.approx(expected, rel=1e-12)
        assert max_rocof(imbalance, synchronous_inertia(grid, sub, committed), f0) == pytest.approx(expected, rel=1e-12)

        k = float(rng.uniform(0.1, 10.0))
        assert max_rocof(k * imbalance, k * fleet, f0) == pytest.approx(expected, rel=1e-12)


def test_rocof_exactly_at_the_limit_survives():
    grid = GridModel(
        buses=(Bus("A", "a", 18.0, -66.0, 115.0),),
        lines=(),
        # 2 * 5 s * 60 MW = 600 MW s of inertia
        generators=(Generator("g", "A", GeneratorKind.THERMAL, 60.0, 0.0, 5.0, 5.0, 50.0),),
        feeders=(Feeder("f", "A", 100.0, 100, 0.0, ((18.0, -66.0),)),),
    )
    (sub,) = find_subgrids(grid, Topology())
    committed = frozenset({"g"})
    for generation, demand in ((60.0, 40.0), (20.0, 40.0)):
        surviving, removed, (verdict,) = stability_screen(grid, (sub,), {"g": generation}, {"f": demand}, committed, 2.0)
        assert abs(verdict.rocof) == 2.0
        assert verdict.stable
        assert surviving == [sub] and removed == []

    surviving, removed, _ = stability_screen(grid, (sub,), {"g": 60.0}, {"f": 40.0}, committed, 1.999)
    assert surviving == [] and removed == [sub]


def test_random_cascades_reach_a_fixed_point_within_the_line_count():
    rng = np.random.default_rng(5)
    for _ in range(500):
        n = int(rng.integers(2, 13))
        grid = random_grid(rng, n, extra_lines=int(rng.integers(0, n)), rating=float(rng.uniform(20.0, 80.0)))
        gen_buses = {grid.buses[int(i)].id for i in rng.choice(n, size=int(rng.integers(1, n)), replace=False)}
        grid = replace(
            grid,
            generators=tuple(Generator(f"g_{b}", b, GeneratorKind.THERMAL, 200.0, 0.0, 5.0, 5.0, 50.0) for b in sorted(gen_buses)),
            feeders=tuple(
                Feeder(f"f_{b.id}", b.id, 50.0, 100, 0.0, (b.point,)) for b in grid.buses if b.id not in gen_buses
            ),
        )
        damaged = frozenset(ln.id for ln in grid.lines if rng.random() < 0.3)
        bus_gen = {b: float(rng.uniform(20.0, 150.0)) for b in gen_buses}
        bus_dem = {f.substation_bus: float(rng.uniform(10.0, 100.0)) for f in grid.feeders}

        result = cascade(grid, Topology(out_lines=damaged), bus_gen, bus_dem)
        assert 1 <= result.iterations <= len(grid.lines)
        assert len({t.iteration for t in result.trips}) <= len(grid.lines)
        assert all(abs(f) <= grid.line_by_id[lid].emergency_rating for lid, f in result.flows.items())
        assert cascade(grid, Topology(out_lines=damaged), bus_gen, bus_dem) == result
