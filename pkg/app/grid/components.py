"""
Wind-fragile components of a grid: what can fail, where it is, and which
fragility class governs it.
"""

import math
from dataclasses import dataclass
from enum import Enum

from app.grid.base import GeneratorKind, GridModel, Point
from app.hazard.geo import polyline_length_km

DEFAULT_TOWER_SPACING_KM = 1.0


class ComponentClass(str, Enum):
    TRANSMISSION_LINE = "transmission_line"
    TRANSMISSION_TOWER = "transmission_tower"
    DISTRIBUTION_FEEDER = "distribution_feeder"
    UTILITY_SOLAR = "utility_solar"
    ROOFTOP_SOLAR = "rooftop_solar"


@dataclass(frozen=True)
class FragileComponent:
    id: str
    component_class: ComponentClass
    geometry: tuple[Point, ...]
    towers: int = 0


def tower_count(route: tuple[Point, ...], spacing_km: float = DEFAULT_TOWER_SPACING_KM) -> int:
    return max(1, math.ceil(polyline_length_km(route) / spacing_km))


def fragile_components(grid: GridModel, tower_spacing_km: float = DEFAULT_TOWER_SPACING_KM) -> tuple[FragileComponent, ...]:
    """Lines, feeders, utility solar plants and per-feeder rooftop solar, in that order."""
    out = [
        FragileComponent(ln.id, ComponentClass.TRANSMISSION_LINE, ln.span_points, tower_count(ln.span_points, tower_spacing_km))
        for ln in grid.lines
    ]
    out += [FragileComponent(f.id, ComponentClass.DISTRIBUTION_FEEDER, f.route_points) for f in grid.feeders]
    out += [
        FragileComponent(g.id, ComponentClass.UTILITY_SOLAR, (grid.bus_by_id[g.bus].point,))
        for g in grid.generators
        if g.kind == GeneratorKind.UTILITY_SOLAR
    ]
    out += [FragileComponent(f.btm_unit_id, ComponentClass.ROOFTOP_SOLAR, f.route_points) for f in grid.feeders]
    return tuple(out)
