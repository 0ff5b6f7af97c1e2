"""
Static power-system data model.
All types are frozen; a GridModel is shared read-only across realizations.
"""

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property


class GeneratorKind(str, Enum):
    THERMAL = "thermal"
    HYDRO = "hydro"
    UTILITY_SOLAR = "utility_solar"
    WIND = "wind"
    BTM_SOLAR = "btm_solar"


SYNCHRONOUS_KINDS = frozenset({GeneratorKind.THERMAL, GeneratorKind.HYDRO})
CURTAILABLE_KINDS = frozenset({GeneratorKind.UTILITY_SOLAR, GeneratorKind.WIND})
SOLAR_KINDS = frozenset({GeneratorKind.UTILITY_SOLAR, GeneratorKind.BTM_SOLAR})

# $/MWh used when generators.csv leaves the cost column blank
DEFAULT_MARGINAL_COST = {
    GeneratorKind.THERMAL: 50.0,
    GeneratorKind.HYDRO: 5.0,
    GeneratorKind.UTILITY_SOLAR: 1.0,
    GeneratorKind.WIND: 1.0,
    GeneratorKind.BTM_SOLAR: 0.0,
}

DEFAULT_SYSTEM_BASE_MVA = 100.0
DEFAULT_FREQUENCY_HZ = 60.0
DEFAULT_CUSTOMERS_PER_MW = 535.0

BTM_PREFIX = "btm:"

Point = tuple[float, float]  # (lat, lon)


@dataclass(frozen=True)
class Bus:
    id: str
    name: str
    lat: float
    lon: float
    voltage_class: float
    region: str = ""

    @property
    def point(self) -> Point:
        return (self.lat, self.lon)


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    reactance: float
    rating: float
    emergency_rating: float
    span_points: tuple[Point, ...]


@dataclass(frozen=True)
class Generator:
    id: str
    bus: str
    kind: GeneratorKind
    p_max: float
    p_min: float
    ramp_rate: float
    inertia: float
    marginal_cost: float
    available: bool = True

    @property
    def synchronous(self) -> bool:
        return self.kind in SYNCHRONOUS_KINDS

    @property
    def committable(self) -> bool:
        return self.kind in SYNCHRONOUS_KINDS


@dataclass(frozen=True)
class Feeder:
    id: str
    substation_bus: str
    peak_demand: float
    customers: int
    btm_solar_capacity: float
    route_points: tuple[Point, ...]
    shape_id: str = ""
    demand_shape: tuple[float, ...] = ()

    def multiplier(self, step: int) -> float:
        """Demand multiplier at a step; the last value holds past the end of the shape."""
        if not self.demand_shape:
            return 1.0
        if step < len(self.demand_shape):
            return self.demand_shape[step]
        return self.demand_shape[-1]

    def demand(self, step: int) -> float:
        return self.peak_demand * self.multiplier(step)

    @property
    def btm_unit_id(self) -> str:
        return f"{BTM_PREFIX}{self.id}"


@dataclass(frozen=True)
class GridModel:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    generators: tuple[Generator, ...]
    feeders: tuple[Feeder, ...]
    system_base: float = DEFAULT_SYSTEM_BASE_MVA
    frequency: float = DEFAULT_FREQUENCY_HZ

    @cached_property
    def bus_by_id(self) -> dict[str, Bus]:
        return {b.id: b for b in self.buses}

    @cached_property
    def line_by_id(self) -> dict[str, Line]:
        return {ln.id: ln for ln in self.lines}

    @cached_property
    def generator_by_id(self) -> dict[str, Generator]:
        return {g.id: g for g in self.all_generators}

    @cached_property
    def feeder_by_id(self) -> dict[str, Feeder]:
        return {f.id: f for f in self.feeders}

    @cached_property
    def btm_units(self) -> tuple[Generator, ...]:
        """One aggregate BTM solar unit per feeder, attached to its substation bus."""
        return tuple(
            Generator(
                id=f.btm_unit_id,
                bus=f.substation_bus,
                kind=GeneratorKind.BTM_SOLAR,
                p_max=f.btm_solar_capacity,
                p_min=0.0,
                ramp_rate=0.0,
                inertia=0.0,
                marginal_cost=DEFAULT_MARGINAL_COST[GeneratorKind.BTM_SOLAR],
                available=True,
            )
            for f in self.feeders
        )

    @cached_property
    def all_generators(self) -> tuple[Generator, ...]:
        return self.generators + self.btm_units

    @cached_property
    def generators_at_bus(self) -> dict[str, tuple[Generator, ...]]:
        out: dict[str, list[Generator]] = {b.id: [] for b in self.buses}
        for g in self.generators:
            out.setdefault(g.bus, []).append(g)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def feeders_at_bus(self) -> dict[str, tuple[Feeder, ...]]:
        out: dict[str, list[Feeder]] = {b.id: [] for b in self.buses}
        for f in self.feeders:
            out.setdefault(f.substation_bus, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def total_customers(self) -> int:
        return sum(f.customers for f in self.feeders)

    @cached_property
    def regions(self) -> tuple[str, ...]:
        return tuple(sorted({b.region for b in self.buses if b.region}))

    def feeder_region(self, feeder: Feeder) -> str:
        return self.bus_by_id[feeder.substation_bus].region

    def with_feeders(self, feeders: tuple[Feeder, ...]) -> "GridModel":
        return replace(self, feeders=feeders)
