"""Hand-built grids and exposures shared by the tests."""

import json
import math
from datetime import timedelta
from pathlib import Path

import numpy as np

from app.grid.base import Bus, Feeder, Generator, GeneratorKind, GridModel, Line
from app.grid.components import ComponentClass, fragile_components
from app.grid.synthetic import EVENT_DAY
from app.hazard.exposure import HazardExposure
from app.simulation.horizon import Horizon
from app.simulation.state import RealizationResult, blackout_step, largest_failure
from app.vulnerability.fragility import FragilityCurve


def make_exposure(
    grid: GridModel,
    n_steps: int,
    winds: dict[str, dict[int, float]] | None = None,
    turbine_winds: dict[str, dict[int, float]] | None = None,
    solar: float = 0.0,
    step_minutes: float = 10.0,
    tower_spacing_km: float = 1.0,
) -> HazardExposure:
    """Exposure with hand-set winds: {component id: {step: m/s}}; everything else calm."""
    ids = tuple(c.id for c in fragile_components(grid, tower_spacing_km))
    component_wind = np.zeros((n_steps, len(ids)))
    for cid, series in (winds or {}).items():
        for k, v in series.items():
            component_wind[k, ids.index(cid)] = v

    turbine_ids = tuple(g.id for g in grid.generators if g.kind == GeneratorKind.WIND)
    turbine_wind = np.zeros((n_steps, len(turbine_ids)))
    for gid, series in (turbine_winds or {}).items():
        for k, v in series.items():
            turbine_wind[k, turbine_ids.index(gid)] = v

    solar_ids = tuple(g.id for g in grid.generators if g.kind == GeneratorKind.UTILITY_SOLAR)
    solar_ids += tuple(f.btm_unit_id for f in grid.feeders)
    start = EVENT_DAY
    end = start + timedelta(minutes=step_minutes * (n_steps - 1))
    return HazardExposure(
        times=Horizon(start, end, step_minutes).times,
        component_ids=ids,
        component_wind=component_wind,
        turbine_ids=turbine_ids,
        turbine_wind=turbine_wind,
        solar_ids=solar_ids,
        solar_fraction=np.full((n_steps, len(solar_ids)), solar),
        clear_sky=np.full(n_steps, solar),
        storm_active=np.ones(n_steps, dtype=bool),
    )


def sharp_curves(line_median: float = 40.0, beta: float = 0.01) -> dict[ComponentClass, FragilityCurve]:
    """Near-deterministic curves: lines fail just above line_median, nothing else fails in practice."""
    return {
        ComponentClass.TRANSMISSION_LINE: FragilityCurve(ComponentClass.TRANSMISSION_LINE, line_median, beta),
        ComponentClass.TRANSMISSION_TOWER: FragilityCurve(ComponentClass.TRANSMISSION_TOWER, 1000.0, beta),
        ComponentClass.DISTRIBUTION_FEEDER: FragilityCurve(ComponentClass.DISTRIBUTION_FEEDER, 500.0, beta),
        ComponentClass.UTILITY_SOLAR: FragilityCurve(ComponentClass.UTILITY_SOLAR, 500.0, beta),
        ComponentClass.ROOFTOP_SOLAR: FragilityCurve(ComponentClass.ROOFTOP_SOLAR, 500.0, beta),
    }


def parallel_grid(emergency: float = 40.0) -> GridModel:
    """Generator bus A and load bus B joined by three identical lines."""
    a = Bus("A", "gen", 18.0, -66.6, 115.0, "south")
    b = Bus("B", "load", 18.05, -66.6, 115.0, "north")
    route = (a.point, b.point)
    return GridModel(
        buses=(a, b),
        lines=tuple(Line(f"l{i}", "A", "B", 0.1, emergency, emergency, route) for i in (1, 2, 3)),
        generators=(Generator("g1", "A", GeneratorKind.THERMAL, 200.0, 0.0, 10.0, 5.0, 50.0),),
        feeders=(Feeder("f1", "B", 90.0, 1000, 0.0, (b.point,)),),
    )


def mixed_grid() -> GridModel:
    """Two buses carrying one generator of every dispatchable kind and a BTM-solar feeder."""
    g = Bus("G", "gen", 18.0, -66.6, 115.0, "south")
    ld = Bus("L", "load", 18.05, -66.55, 115.0, "north")
    return GridModel(
        buses=(g, ld),
        lines=(Line("tie", "G", "L", 0.05, 300.0, 360.0, (g.point, ld.point)),),
        generators=(
            Generator("th", "G", GeneratorKind.THERMAL, 200.0, 20.0, 5.0, 5.0, 50.0),
            Generator("hy", "G", GeneratorKind.HYDRO, 50.0, 0.0, 10.0, 3.0, 5.0),
            Generator("pv", "G", GeneratorKind.UTILITY_SOLAR, 40.0, 0.0, 0.0, 0.0, 1.0),
            Generator("wt", "L", GeneratorKind.WIND, 30.0, 0.0, 0.0, 0.0, 1.0),
        ),
        feeders=(Feeder("f1", "L", 100.0, 5000, 20.0, (ld.point, (18.06, -66.54))),),
    )


def realization(index, performance, lines=None, regions=None, solar=None) -> RealizationResult:
    """Hand-built realization record; blackout and largest failure follow from `performance`."""
    actual, clear = solar if solar else ([], [])
    return RealizationResult(
        index=index,
        seed=1000 + index,
        performance=list(performance),
        served_mw=[0.0] * len(performance),
        shed_mw=[0.0] * len(performance),
        events=[],
        blackout_step=blackout_step(performance),
        largest_failure=largest_failure(performance),
        line_failure_steps=lines or {},
        region_performance=regions or {},
        solar_actual_mw=list(actual),
        solar_clear_sky_mw=list(clear),
    )


def single_bus_shortage() -> GridModel:
    """70 MW of thermal capacity against feeders of 60 and 40 MW on one bus: 30 MW must be shed."""
    a = Bus("A", "island", 18.0, -66.6, 115.0)
    return GridModel(
        buses=(a,),
        lines=(),
        generators=(Generator("g", "A", GeneratorKind.THERMAL, 70.0, 0.0, 5.0, 5.0, 50.0),),
        feeders=(
            Feeder("f1", "A", 60.0, 600, 0.0, (a.point,)),
            Feeder("f2", "A", 40.0, 400, 0.0, (a.point,)),
        ),
    )


def random_grid(rng: np.random.Generator, n_buses: int, extra_lines: int = 0, rating: float = math.inf) -> GridModel:
    """Connected grid without units or feeders: a random spanning tree plus extra, possibly parallel, lines."""
    buses = tuple(Bus(f"b{i:02d}", f"b{i:02d}", 18.0 + 0.01 * i, -66.0 - 0.01 * i, 115.0) for i in range(n_buses))
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, n_buses)]
    if n_buses > 1:
        pairs += [tuple(int(x) for x in rng.choice(n_buses, 2, replace=False)) for _ in range(extra_lines)]
    lines = tuple(
        Line(f"l{k:02d}", buses[a].id, buses[b].id, float(rng.uniform(0.02, 0.3)), rating, rating, (buses[a].point, buses[b].point))
        for k, (a, b) in enumerate(pairs)
    )
    return GridModel(buses=buses, lines=lines, generators=(), feeders=())


def rewrite(path: Path, name: str = "edited.json", **changes) -> Path:
    """Copy of a run config with `section__key=value` (or whole `section=value`) changes applied."""
    raw = json.loads(path.read_text())
    for dotted, value in changes.items():
        section, _, key = dotted.partition("__")
        if key:
            raw.setdefault(section, {})[key] = value
        else:
            raw[section] = value
    out = path.with_name(name)
    out.write_text(json.dumps(raw))
    return out
