"""
Deterministic synthetic testbeds.

  toy_radial   one generator bus, one tie line, one load bus
  solar_heavy  30 buses: generation in the south, load in the north, BTM solar on every feeder
  large        100 buses, ~150 lines, for throughput runs

`write_testbed` writes the grid tables, a storm track crossing the island,
a roughness raster, the fragility table and a config.json ready for the CLI.
"""

import logging
import math
import os
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path

import numpy as np

from app.grid.base import Bus, Feeder, Generator, GeneratorKind, GridModel, Line, Point
from app.grid.loader import validate_grid, write_grid
from app.grid.scaling import scale_renewable_integration
from app.hazard.roughness import OPEN_WATER_Z0, RoughnessMap, write_roughness
from app.hazard.track import StormTrack, TrackPoint, write_track
from app.schemas.config import (
    EnsembleConfig,
    HorizonConfig,
    InputsConfig,
    RunConfig,
    SolarConfig,
    write_run_config,
)
from app.simulation.horizon import Horizon
from app.vulnerability.fragility import DEFAULT_CURVES, write_fragility
from app.vulnerability.solar import DiurnalShape

logger = logging.getLogger(__name__)

EVENT_DAY = datetime(2000, 9, 20, tzinfo=timezone.utc)
BASELINE_INTEGRATION = 0.161
LAND_Z0 = 0.03
CUSTOMERS_PER_MW = 535
DIURNAL_KNOTS = ((10.0, 0.0), (13.0, 1.0), (19.0, 1.0), (22.0, 0.0))
TESTBED_DIURNAL = DiurnalShape(knots=DIURNAL_KNOTS, interpolation="linear")

# island bounding box (lat, lon)
LAT_SOUTH, LAT_NORTH = 17.95, 18.45
LON_WEST, LON_EAST = -67.2, -65.6


class TestbedKind(str, Enum):
    TOY_RADIAL = "toy_radial"
    SOLAR_HEAVY = "solar_heavy"
    LARGE = "large"


def _event_horizon() -> Horizon:
    return Horizon.event_day(EVENT_DAY)


def demand_shape(n_steps: int = 139, step_minutes: float = 10.0) -> tuple[float, ...]:
    """Daily multiplier peaking at 00 UTC (evening local), lowest around 10 UTC."""
    out = []
    for k in range(n_steps):
        hour = k * step_minutes / 60.0
        out.append(round(0.8 + 0.2 * math.cos(2.0 * math.pi * hour / 24.0), 6))
    return tuple(out)


def _route(a: Point, b: Point) -> tuple[Point, ...]:
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    return (a, mid, b)


def _feeder_route(p: Point) -> tuple[Point, ...]:
    return (p, (p[0] + 0.02, p[1] + 0.01), (p[0] + 0.03, p[1] + 0.03))


def _feeder(fid: str, bus: Bus, peak: float, shape: tuple[float, ...]) -> Feeder:
    return Feeder(
        id=fid,
        substation_bus=bus.id,
        peak_demand=peak,
        customers=int(round(peak * CUSTOMERS_PER_MW)),
        btm_solar_capacity=0.0,
        route_points=_feeder_route(bus.point),
        shape_id="res" if shape else "",
        demand_shape=shape,
    )


def toy_radial() -> GridModel:
    g = Bus("G", "generation", 18.0, -66.6, 230.0, "south")
    ld = Bus("L", "load", 18.1, -66.5, 230.0, "north")
    grid = GridModel(
        buses=(g, ld),
        lines=(Line("tie", "G", "L", 0.05, 200.0, 240.0, _route(g.point, ld.point)),),
        generators=(Generator("g1", "G", GeneratorKind.THERMAL, 150.0, 10.0, 5.0, 5.0, 50.0),),
        feeders=(_feeder("f1", ld, 80.0, ()),),
    )
    validate_grid(grid)
    return grid


def _mesh(rows: int, cols: int, vertical_cols: tuple[int, ...], x: float, rating: float) -> tuple[tuple[Bus, ...], tuple[Line, ...]]:
    """Rectangular bus mesh over the island; row 0 is the south coast."""
    buses = []
    for r in range(rows):
        lat = LAT_SOUTH + (LAT_NORTH - LAT_SOUTH) * r / max(rows - 1, 1)
        region = "south" if r < rows / 3 else ("central" if r < 2 * rows / 3 else "north")
        for c in range(cols):
            lon = LON_WEST + (LON_EAST - LON_WEST) * c / max(cols - 1, 1)
            buses.append(Bus(f"b{r:02d}{c:02d}", f"bus {r}-{c}", round(lat, 6), round(lon, 6), 115.0, region))
    at = {(r, c): buses[r * cols + c] for r in range(rows) for c in range(cols)}

    lines = []
    for r in range(rows):
        for c in range(cols - 1):
            a, b = at[(r, c)], at[(r, c + 1)]
            lines.append(Line(f"h{r:02d}{c:02d}", a.id, b.id, x, rating, rating * 1.2, _route(a.point, b.point)))
    for c in vertical_cols:
        for r in range(rows - 1):
            a, b = at[(r, c)], at[(r + 1, c)]
            lines.append(Line(f"v{r:02d}{c:02d}", a.id, b.id, x, rating, rating * 1.2, _route(a.point, b.point)))
    return tuple(buses), tuple(lines)


def solar_heavy(integration_level: float = BASELINE_INTEGRATION) -> GridModel:
    buses, lines = _mesh(3, 10, tuple(range(10)), x=0.04, rating=400.0)
    south = buses[:10]
    shape = demand_shape()

    generators = [
        Generator(f"th{i}", south[c].id, GeneratorKind.THERMAL, 400.0, 80.0, 5.0, 5.0, 40.0 + 5.0 * i)
        for i, c in enumerate((1, 3, 5, 7, 9))
    ]
    generators.append(Generator("hy0", south[0].id, GeneratorKind.HYDRO, 150.0, 20.0, 10.0, 3.0, 5.0))
    generators.append(Generator("pv0", south[2].id, GeneratorKind.UTILITY_SOLAR, 100.0, 0.0, 0.0, 0.0, 1.0))
    generators.append(Generator("pv1", south[6].id, GeneratorKind.UTILITY_SOLAR, 100.0, 0.0, 0.0, 0.0, 1.0))
    generators.append(Generator("wt0", buses[14].id, GeneratorKind.WIND, 80.0, 0.0, 0.0, 0.0, 1.0))

    feeders = tuple(_feeder(f"fd{b.id[1:]}", b, 80.0, shape) for b in buses[10:])
    grid = GridModel(buses=buses, lines=lines, generators=tuple(generators), feeders=feeders)
    grid = scale_renewable_integration(grid, integration_level, _event_horizon(), TESTBED_DIURNAL)
    validate_grid(grid)
    return grid


def large() -> GridModel:
    buses, lines = _mesh(10, 10, (0, 2, 4, 6, 8, 9), x=0.03, rating=350.0)
    shape = demand_shape()
    generators = []
    for i, idx in enumerate(range(3, 100, 7)):
        kind = GeneratorKind.HYDRO if i % 7 == 6 else GeneratorKind.THERMAL
        generators.append(Generator(f"u{i:02d}", buses[idx].id, kind, 300.0, 60.0, 5.0, 4.0, 30.0 + 2.0 * i))
    feeders = tuple(_feeder(f"fd{b.id[1:]}", b, 30.0, shape) for b in buses)
    grid = GridModel(buses=buses, lines=lines, generators=tuple(generators), feeders=feeders)
    grid = scale_renewable_integration(grid, BASELINE_INTEGRATION, _event_horizon(), TESTBED_DIURNAL)
    validate_grid(grid)
    return grid


def synthetic_track(peak_vmax: float = 65.0, rmax: float = 40.0) -> StormTrack:
    """Storm crossing the island from the southeast, landfall near 12 UTC."""
    start = EVENT_DAY - timedelta(hours=3)
    points = []
    for k in range(10):
        frac = k / 9.0
        lat = 16.9 + 2.6 * frac
        lon = -64.6 - 3.8 * frac
        # intensifies over water, weakens a little over land
        vmax = peak_vmax * (0.85 + 0.15 * math.sin(math.pi * min(frac / 0.55, 1.0)))
        points.append(TrackPoint(start + timedelta(hours=3 * k), round(lat, 6), round(lon, 6), round(vmax, 4), rmax))
    return StormTrack(tuple(points))


def island_roughness(cellsize: float = 0.05) -> RoughnessMap:
    """Land roughness over the island box, open water in a one-cell ring around it."""
    xll, yll = LON_WEST - 0.2, LAT_SOUTH - 0.2
    ncols = int(round((LON_EAST - LON_WEST + 0.4) / cellsize))
    nrows = int(round((LAT_NORTH - LAT_SOUTH + 0.4) / cellsize))
    z0 = np.full((nrows, ncols), LAND_Z0)
    z0[0, :] = z0[-1, :] = OPEN_WATER_Z0
    z0[:, 0] = z0[:, -1] = OPEN_WATER_Z0
    return RoughnessMap(z0, xll=xll, yll=yll, cellsize=cellsize, source="synthetic")


def build_testbed(kind: TestbedKind | str) -> GridModel:
    kind = TestbedKind(kind)
    if kind == TestbedKind.TOY_RADIAL:
        return toy_radial()
    if kind == TestbedKind.SOLAR_HEAVY:
        return solar_heavy()
    return large()


def write_testbed(directory: str | os.PathLike, kind: TestbedKind | str = TestbedKind.SOLAR_HEAVY, n: int = 50) -> Path:
    """Write a complete input set; returns the path of its config.json."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    grid = build_testbed(kind)
    write_grid(grid, d / "grid")
    write_track(synthetic_track(), d / "track.csv")
    write_roughness(island_roughness(), d / "roughness.asc")
    write_fragility(DEFAULT_CURVES, d / "fragility.csv")

    config = RunConfig(
        inputs=InputsConfig(grid_dir="grid", track="track.csv", roughness="roughness.asc", fragility="fragility.csv"),
        horizon=HorizonConfig(start=EVENT_DAY, end=EVENT_DAY + timedelta(hours=23), step_minutes=10.0),
        solar=SolarConfig(diurnal_knots=list(DIURNAL_KNOTS), diurnal_interpolation="linear"),
        ensemble=EnsembleConfig(n=n, master_seed=20000920),
        output_dir="out",
    )
    path = d / "config.json"
    write_run_config(config, path)
    logger.info(f"Wrote {TestbedKind(kind).value} testbed to {d}")
    return path
