"""
Overload cascade within one step.

Flows are solved on every functional sub-grid, overloaded lines trip together,
connectivity is recomputed and the loop repeats until nothing trips.
"""

import logging
from dataclasses import dataclass, field

from app.errors import SingularSystem
from app.grid.base import GridModel
from app.network.powerflow import dc_power_flow
from app.network.subgrids import SubGrid, Topology, find_subgrids
from app.simulation.streams import substream_uniform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TripRule:
    """Deterministic trip above emergency rating; optional random trip between normal and emergency."""

    trip_probability: float = 0.0
    seed: int = 0
    step: int = 0

    def trips(self, line_id: str, flow: float, rating: float, emergency: float, iteration: int) -> bool:
        loading = abs(flow)
        if loading > emergency:
            return True
        if self.trip_probability > 0.0 and loading > rating:
            u = substream_uniform(self.seed, "trip", self.step, iteration, line_id)
            return bool(u < self.trip_probability)
        return False


@dataclass(frozen=True)
class LineTrip:
    iteration: int
    line_id: str
    flow: float


@dataclass
class CascadeResult:
    subgrids: tuple[SubGrid, ...]
    topology: Topology
    trips: list[LineTrip] = field(default_factory=list)
    flows: dict[str, float] = field(default_factory=dict)
    singular: set[str] = field(default_factory=set)  # sub-grid keys
    iterations: int = 0


def balanced_injections(
    sub: SubGrid, bus_generation: dict[str, float], bus_demand: dict[str, float]
) -> dict[str, float]:
    """Per-bus injections with the larger side scaled down to match the smaller."""
    gen = {b: bus_generation.get(b, 0.0) for b in sub.buses}
    load = {b: bus_demand.get(b, 0.0) for b in sub.buses}
    g_total, l_total = sum(gen.values()), sum(load.values())
    if g_total > l_total and g_total > 0:
        k = l_total / g_total
        gen = {b: v * k for b, v in gen.items()}
    elif l_total > g_total and l_total > 0:
        k = g_total / l_total
        load = {b: v * k for b, v in load.items()}
    return {b: gen[b] - load[b] for b in sub.buses}


def cascade(
    grid: GridModel,
    topology: Topology,
    bus_generation: dict[str, float],
    bus_demand: dict[str, float],
    rule: TripRule = TripRule(),
) -> CascadeResult:
    """Trip overloaded lines to a fixed point; a pass counts as an iteration when it solves a flow."""
    result = CascadeResult(subgrids=(), topology=topology)
    for iteration in range(len(grid.lines) + 1):
        subs = find_subgrids(grid, topology)
        result.subgrids, result.topology = subs, topology
        result.flows, result.singular = {}, set()

        solved = False
        tripped: list[LineTrip] = []
        for sub in subs:
            if not sub.functional or not sub.lines:
                continue
            solved = True
            try:
                solution = dc_power_flow(grid, sub, balanced_injections(sub, bus_generation, bus_demand))
            except SingularSystem as e:
                logger.warning(f"Flow solve failed, sub-grid treated as non-functional: {e.message}")
                result.singular.add(sub.key)
                continue
            result.flows.update(solution.flows)
            for lid in sub.lines:
                ln = grid.line_by_id[lid]
                if rule.trips(lid, solution.flows[lid], ln.rating, ln.emergency_rating, iteration):
                    tripped.append(LineTrip(iteration, lid, solution.flows[lid]))

        if solved or iteration == 0:
            result.iterations = iteration + 1
        if not tripped:
            break
        result.trips.extend(tripped)
        topology = topology.without_lines(t.line_id for t in tripped)
    if result.trips:
        logger.debug(f"Cascade tripped {len(result.trips)} lines in {result.iterations} passes")
    return result
