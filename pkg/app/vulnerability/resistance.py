"""
Per-realization wind resistances sampled by inverting fragility curves.

Each component draws from its own (seed, component id) substream: one uniform
for the component itself and, for transmission lines, one per tower along the
route. A line's resistance is the weakest of its own and its towers'.
"""

import logging
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from app.errors import InvariantViolation, MissingCurve, UnknownComponent
from app.grid.base import GridModel
from app.grid.components import DEFAULT_TOWER_SPACING_KM, ComponentClass, FragileComponent, fragile_components
from app.simulation.streams import substream_uniforms
from app.vulnerability.fragility import FragilityCurve

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ResistanceAssignment:
    seed: int
    components: tuple[FragileComponent, ...]
    curves: dict[ComponentClass, FragilityCurve]
    draws: tuple[np.ndarray, ...]
    resistance: np.ndarray  # m/s, aligned with components

    @cached_property
    def index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.components)}

    @property
    def component_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.components)

    def of(self, component_id: str) -> float:
        i = self.index.get(component_id)
        if i is None:
            raise UnknownComponent(component_id)
        return float(self.resistance[i])

    def as_dict(self) -> dict[str, float]:
        return {c.id: float(r) for c, r in zip(self.components, self.resistance)}


def _required_classes(grid: GridModel, components: tuple[FragileComponent, ...]) -> set[ComponentClass]:
    required = {c.component_class for c in components if c.component_class != ComponentClass.ROOFTOP_SOLAR}
    if grid.lines:
        required.add(ComponentClass.TRANSMISSION_TOWER)
    if any(f.btm_solar_capacity > 0 for f in grid.feeders):
        required.add(ComponentClass.ROOFTOP_SOLAR)
    return required


def _component_resistance(
    component: FragileComponent, draws: np.ndarray, curves: dict[ComponentClass, FragilityCurve]
) -> float:
    curve = curves.get(component.component_class)
    if curve is None:
        # only rooftop solar on feeders without installed capacity gets here
        return float("inf")
    r = float(curve.resistance(draws[0]))
    if component.towers:
        r = min(r, float(curves[ComponentClass.TRANSMISSION_TOWER].resistance(draws[1:]).min()))
    return r


def sample_resistances(
    grid: GridModel,
    curves: dict[ComponentClass, FragilityCurve],
    seed: int,
    tower_spacing_km: float = DEFAULT_TOWER_SPACING_KM,
) -> ResistanceAssignment:
    components = fragile_components(grid, tower_spacing_km)
    missing = sorted(c.value for c in _required_classes(grid, components) - set(curves))
    if missing:
        raise MissingCurve(missing[0])

    draws = tuple(substream_uniforms(seed, c.id, 1 + c.towers) for c in components)
    resistance = np.array([_component_resistance(c, d, curves) for c, d in zip(components, draws)])
    return ResistanceAssignment(seed=seed, components=components, curves=curves, draws=draws, resistance=resistance)


def preset_resistance_rank(assignment: ResistanceAssignment, component_id: str, rank: float) -> ResistanceAssignment:
    """Replace one component's draws (its towers' included) with `rank`."""
    if not 0.0 <= rank <= 1.0:
        raise InvariantViolation(f"rank must lie in [0, 1], got {rank}")
    i = assignment.index.get(component_id)
    if i is None:
        raise UnknownComponent(component_id)

    component = assignment.components[i]
    draws = list(assignment.draws)
    draws[i] = np.full_like(draws[i], rank)
    resistance = assignment.resistance.copy()
    resistance[i] = _component_resistance(component, draws[i], assignment.curves)
    return replace(assignment, draws=tuple(draws), resistance=resistance)
