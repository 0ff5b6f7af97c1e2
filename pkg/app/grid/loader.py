"""
Tabular ingestion and export of GridModel.

Tables (UTF-8 CSV, header row required):
  buses.csv      id,name,lat,lon,kv,region
  lines.csv      id,from,to,x_pu,rating_mw,emergency_mw,geometry_wkt
  generators.csv id,bus,kind,p_max_mw,p_min_mw,ramp_mw_min,h_s,cost,available
  feeders.csv    id,bus,peak_mw,customers,btm_mw,geometry_wkt,shape_id
  shapes.csv     shape_id,step,multiplier   (optional)
Row numbers in ParseError are 1-based data rows (the header is row 0).
"""

import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import pandas as pd
import shapely
from shapely.errors import GEOSException
from shapely.geometry import LineString, Point as ShapelyPoint

from app.errors import DanglingReference, InvariantViolation, MissingFile, ParseError
from app.grid.base import (
    DEFAULT_CUSTOMERS_PER_MW,
    DEFAULT_FREQUENCY_HZ,
    DEFAULT_MARGINAL_COST,
    DEFAULT_SYSTEM_BASE_MVA,
    SYNCHRONOUS_KINDS,
    Bus,
    Feeder,
    Generator,
    GeneratorKind,
    GridModel,
    Line,
    Point,
)

logger = logging.getLogger(__name__)

BUS_COLUMNS = ["id", "name", "lat", "lon", "kv", "region"]
LINE_COLUMNS = ["id", "from", "to", "x_pu", "rating_mw", "emergency_mw", "geometry_wkt"]
GENERATOR_COLUMNS = ["id", "bus", "kind", "p_max_mw", "p_min_mw", "ramp_mw_min", "h_s", "cost", "available"]
FEEDER_COLUMNS = ["id", "bus", "peak_mw", "customers", "btm_mw", "geometry_wkt", "shape_id"]
SHAPE_COLUMNS = ["shape_id", "step", "multiplier"]

MAX_DEMAND_MULTIPLIER = 1.5


@dataclass(frozen=True)
class GridPaths:
    buses: Path
    lines: Path
    generators: Path
    feeders: Path
    shapes: Optional[Path] = None

    @classmethod
    def from_dir(cls, directory: str | os.PathLike) -> "GridPaths":
        d = Path(directory)
        shapes = d / "shapes.csv"
        return cls(
            buses=d / "buses.csv",
            lines=d / "lines.csv",
            generators=d / "generators.csv",
            feeders=d / "feeders.csv",
            shapes=shapes if shapes.exists() else None,
        )


def _read_table(path: Path, columns: list[str], optional: tuple[str, ...] = ()) -> pd.DataFrame:
    if not Path(path).exists():
        raise MissingFile(str(path))
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(str(e), source=Path(path).name)
    for c in optional:
        if c not in df.columns:
            df[c] = ""
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise ParseError(f"missing columns {missing}", row=0, column=missing[0], source=Path(path).name)
    return df


class _Row:
    """Typed accessors over one CSV row that raise ParseError with the row/column position."""

    def __init__(self, source: str, number: int, data: dict):
        self.source = source
        self.number = number
        self.data = data

    def text(self, column: str) -> str:
        return str(self.data.get(column, "")).strip()

    def _convert(self, column: str, fn: Callable, label: str):
        raw = self.text(column)
        try:
            value = fn(raw)
        except (TypeError, ValueError):
            raise ParseError(f"expected {label}, got '{raw}'", row=self.number, column=column, source=self.source)
        if isinstance(value, float) and not math.isfinite(value):
            raise ParseError(f"non-finite value '{raw}'", row=self.number, column=column, source=self.source)
        return value

    def real(self, column: str) -> float:
        return self._convert(column, float, "a number")

    def integer(self, column: str) -> int:
        return self._convert(column, int, "an integer")

    def optional_number(self, column: str) -> Optional[float]:
        return None if self.text(column) == "" else self.real(column)

    def boolean(self, column: str) -> bool:
        raw = self.text(column).lower()
        if raw in ("", "1", "true", "yes", "y", "t"):
            return True
        if raw in ("0", "false", "no", "n", "f"):
            return False
        raise ParseError(f"expected a boolean, got '{raw}'", row=self.number, column=column, source=self.source)

    def points(self, column: str, allow_point: bool = False) -> tuple[Point, ...]:
        raw = self.text(column)
        try:
            geom = shapely.from_wkt(raw)
        except (GEOSException, ValueError, TypeError):
            raise ParseError(f"invalid WKT '{raw[:40]}'", row=self.number, column=column, source=self.source)
        if isinstance(geom, LineString) or (allow_point and isinstance(geom, ShapelyPoint)):
            return tuple((float(y), float(x)) for x, y in geom.coords)
        raise ParseError(f"expected LINESTRING, got {geom.geom_type}", row=self.number, column=column, source=self.source)


def _rows(df: pd.DataFrame, source: str):
    for i, record in enumerate(df.to_dict(orient="records"), start=1):
        yield _Row(source, i, record)


def _parse_shapes(path: Optional[Path]) -> dict[str, tuple[float, ...]]:
    if path is None:
        return {}
    df = _read_table(path, SHAPE_COLUMNS)
    steps: dict[str, dict[int, float]] = {}
    for row in _rows(df, Path(path).name):
        sid = row.text("shape_id")
        step = row.integer("step")
        steps.setdefault(sid, {})[step] = row.real("multiplier")
    shapes = {}
    for sid, values in steps.items():
        ordered = sorted(values)
        if ordered != list(range(len(ordered))):
            raise InvariantViolation(f"shape '{sid}' steps must be contiguous from 0")
        shapes[sid] = tuple(values[k] for k in ordered)
    return shapes


def load_grid(
    paths: GridPaths,
    system_base: float = DEFAULT_SYSTEM_BASE_MVA,
    frequency: float = DEFAULT_FREQUENCY_HZ,
    customers_per_mw: Optional[float] = None,
) -> GridModel:
    """Read and validate a grid from its CSV tables."""
    buses = []
    for row in _rows(_read_table(paths.buses, BUS_COLUMNS, optional=("name", "region")), "buses.csv"):
        buses.append(
            Bus(
                id=row.text("id"),
                name=row.text("name"),
                lat=row.real("lat"),
                lon=row.real("lon"),
                voltage_class=row.real("kv"),
                region=row.text("region"),
            )
        )

    lines = []
    for row in _rows(_read_table(paths.lines, LINE_COLUMNS), "lines.csv"):
        lines.append(
            Line(
                id=row.text("id"),
                from_bus=row.text("from"),
                to_bus=row.text("to"),
                reactance=row.real("x_pu"),
                rating=row.real("rating_mw"),
                emergency_rating=row.real("emergency_mw"),
                span_points=row.points("geometry_wkt"),
            )
        )

    generators = []
    for row in _rows(_read_table(paths.generators, GENERATOR_COLUMNS, optional=("cost", "available")), "generators.csv"):
        try:
            kind = GeneratorKind(row.text("kind"))
        except ValueError:
            raise ParseError(f"unknown generator kind '{row.text('kind')}'", row=row.number, column="kind", source="generators.csv")
        cost = row.optional_number("cost")
        generators.append(
            Generator(
                id=row.text("id"),
                bus=row.text("bus"),
                kind=kind,
                p_max=row.real("p_max_mw"),
                p_min=row.real("p_min_mw"),
                ramp_rate=row.real("ramp_mw_min"),
                inertia=row.real("h_s"),
                marginal_cost=DEFAULT_MARGINAL_COST[kind] if cost is None else cost,
                available=row.boolean("available"),
            )
        )

    shapes = _parse_shapes(paths.shapes)
    raw_feeders = []
    for row in _rows(_read_table(paths.feeders, FEEDER_COLUMNS, optional=("customers", "shape_id")), "feeders.csv"):
        customers_text = row.text("customers")
        shape_id = row.text("shape_id")
        if shape_id and shape_id not in shapes:
            raise DanglingReference(shape_id, context=f"feeders.csv row {row.number}")
        raw_feeders.append(
            dict(
                id=row.text("id"),
                substation_bus=row.text("bus"),
                peak_demand=row.real("peak_mw"),
                customers=None if customers_text == "" else row.integer("customers"),
                btm_solar_capacity=row.real("btm_mw"),
                route_points=row.points("geometry_wkt", allow_point=True),
                shape_id=shape_id,
                demand_shape=shapes.get(shape_id, ()),
            )
        )

    feeders = tuple(Feeder(**f) for f in _impute_customers(raw_feeders, customers_per_mw))
    grid = GridModel(
        buses=tuple(buses),
        lines=tuple(lines),
        generators=tuple(generators),
        feeders=feeders,
        system_base=system_base,
        frequency=frequency,
    )
    validate_grid(grid)
    logger.info(
        f"Loaded grid: {len(grid.buses)} buses, {len(grid.lines)} lines, "
        f"{len(grid.generators)} generators, {len(grid.feeders)} feeders"
    )
    return grid


def _impute_customers(raw_feeders: list[dict], customers_per_mw: Optional[float]) -> list[dict]:
    """Fill missing customer counts proportionally to peak demand."""
    if all(f["customers"] is not None for f in raw_feeders):
        return raw_feeders
    if customers_per_mw is None:
        known = [f for f in raw_feeders if f["customers"] is not None and f["peak_demand"] > 0]
        known_peak = sum(f["peak_demand"] for f in known)
        customers_per_mw = (
            sum(f["customers"] for f in known) / known_peak if known_peak > 0 else DEFAULT_CUSTOMERS_PER_MW
        )
    imputed = 0
    for f in raw_feeders:
        if f["customers"] is None:
            f["customers"] = int(round(f["peak_demand"] * customers_per_mw))
            imputed += 1
    logger.info(f"Imputed customer counts for {imputed} feeders at {customers_per_mw:.1f} customers/MW")
    return raw_feeders


def _unique(ids: list[str], what: str) -> None:
    seen = set()
    for i in ids:
        if not i:
            raise InvariantViolation(f"{what} with empty id")
        if i in seen:
            raise InvariantViolation(f"duplicate {what} id '{i}'")
        seen.add(i)


def validate_grid(grid: GridModel) -> None:
    """Check every GridModel invariant; raises on the first violation."""
    _unique([b.id for b in grid.buses], "bus")
    _unique([ln.id for ln in grid.lines], "line")
    _unique([g.id for g in grid.generators], "generator")
    _unique([f.id for f in grid.feeders], "feeder")
    # components share one resistance namespace
    _unique(
        [ln.id for ln in grid.lines] + [f.id for f in grid.feeders] + [g.id for g in grid.all_generators],
        "component",
    )
    if grid.system_base <= 0:
        raise InvariantViolation("system_base must be positive")
    if grid.frequency <= 0:
        raise InvariantViolation("rated frequency must be positive")

    buses = grid.bus_by_id
    for b in grid.buses:
        if not -90.0 <= b.lat <= 90.0 or not -180.0 <= b.lon <= 180.0:
            raise InvariantViolation(f"bus '{b.id}' coordinates out of range")
        if b.voltage_class <= 0:
            raise InvariantViolation(f"bus '{b.id}' voltage class must be positive")

    for ln in grid.lines:
        for end in (ln.from_bus, ln.to_bus):
            if end not in buses:
                raise DanglingReference(end, context=f"line '{ln.id}'")
        if ln.from_bus == ln.to_bus:
            raise InvariantViolation(f"line '{ln.id}' connects bus '{ln.from_bus}' to itself")
        if not 0 < ln.rating <= ln.emergency_rating:
            raise InvariantViolation(f"line '{ln.id}' requires 0 < rating <= emergency_rating")
        if ln.reactance <= 0:
            raise InvariantViolation(f"line '{ln.id}' reactance must be positive")
        if len(ln.span_points) < 2:
            raise InvariantViolation(f"line '{ln.id}' geometry needs at least 2 points")

    for g in grid.generators:
        if g.bus not in buses:
            raise DanglingReference(g.bus, context=f"generator '{g.id}'")
        if g.kind == GeneratorKind.BTM_SOLAR:
            raise InvariantViolation(f"generator '{g.id}': btm_solar capacity is declared per feeder (btm_mw)")
        if not 0 <= g.p_min <= g.p_max:
            raise InvariantViolation(f"generator '{g.id}' requires 0 <= p_min <= p_max")
        if g.ramp_rate < 0:
            raise InvariantViolation(f"generator '{g.id}' ramp rate must be non-negative")
        if g.inertia < 0 or (g.inertia > 0 and g.kind not in SYNCHRONOUS_KINDS):
            raise InvariantViolation(f"generator '{g.id}': inertia must be >= 0 and only synchronous kinds carry it")

    for f in grid.feeders:
        if f.substation_bus not in buses:
            raise DanglingReference(f.substation_bus, context=f"feeder '{f.id}'")
        if f.peak_demand < 0 or f.customers < 0 or f.btm_solar_capacity < 0:
            raise InvariantViolation(f"feeder '{f.id}' demand, customers and BTM capacity must be non-negative")
        if any(not 0.0 <= m <= MAX_DEMAND_MULTIPLIER for m in f.demand_shape):
            raise InvariantViolation(f"feeder '{f.id}' demand multipliers must lie in [0, {MAX_DEMAND_MULTIPLIER}]")
        if not f.route_points:
            raise InvariantViolation(f"feeder '{f.id}' has an empty route")

    if not any(g.inertia > 0 for g in grid.generators):
        raise InvariantViolation("grid needs at least one synchronous generator with inertia")


def _num(x: float) -> str:
    return repr(float(x))


def _wkt(points: tuple[Point, ...]) -> str:
    coords = [(lon, lat) for lat, lon in points]
    geom = ShapelyPoint(coords[0]) if len(coords) == 1 else LineString(coords)
    return shapely.to_wkt(geom, rounding_precision=-1)


def write_grid(grid: GridModel, directory: str | os.PathLike) -> GridPaths:
    """Write the grid tables so that load_grid reproduces the same model."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)

    pd.DataFrame(
        [[b.id, b.name, _num(b.lat), _num(b.lon), _num(b.voltage_class), b.region] for b in grid.buses],
        columns=BUS_COLUMNS,
    ).to_csv(d / "buses.csv", index=False)
    pd.DataFrame(
        [
            [ln.id, ln.from_bus, ln.to_bus, _num(ln.reactance), _num(ln.rating), _num(ln.emergency_rating), _wkt(ln.span_points)]
            for ln in grid.lines
        ],
        columns=LINE_COLUMNS,
    ).to_csv(d / "lines.csv", index=False)
    pd.DataFrame(
        [
            [
                g.id, g.bus, g.kind.value, _num(g.p_max), _num(g.p_min), _num(g.ramp_rate),
                _num(g.inertia), _num(g.marginal_cost), "true" if g.available else "false",
            ]
            for g in grid.generators
        ],
        columns=GENERATOR_COLUMNS,
    ).to_csv(d / "generators.csv", index=False)
    pd.DataFrame(
        [
            [
                f.id, f.substation_bus, _num(f.peak_demand), str(f.customers),
                _num(f.btm_solar_capacity), _wkt(f.route_points), f.shape_id,
            ]
            for f in grid.feeders
        ],
        columns=FEEDER_COLUMNS,
    ).to_csv(d / "feeders.csv", index=False)

    shapes: dict[str, tuple[float, ...]] = {}
    for f in grid.feeders:
        if f.shape_id:
            shapes.setdefault(f.shape_id, f.demand_shape)
    shapes_path = None
    if shapes:
        shapes_path = d / "shapes.csv"
        pd.DataFrame(
            [[sid, str(k), _num(m)] for sid, shape in sorted(shapes.items()) for k, m in enumerate(shape)],
            columns=SHAPE_COLUMNS,
        ).to_csv(shapes_path, index=False)

    return GridPaths(
        buses=d / "buses.csv",
        lines=d / "lines.csv",
        generators=d / "generators.csv",
        feeders=d / "feeders.csv",
        shapes=shapes_path,
    )
