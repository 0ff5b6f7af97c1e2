"""
Per-step, per-sub-grid operation problem.

Behind-the-meter solar is netted into feeder demand; the dispatchable set is
thermal and hydro (committable, ramp-limited) plus utility solar and wind
(curtailable).
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

from app.errors import InvariantViolation
from app.grid.base import GridModel
from app.network.subgrids import SubGrid

DEFAULT_VOLL = 10_000.0  # $/MWh
DEFAULT_CURTAILMENT_COST = 100.0  # $/MWh


class DispatchStatus(str, Enum):
    OPTIMAL = "optimal"
    HEURISTIC = "heuristic"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class DispatchCosts:
    value_of_lost_load: float = DEFAULT_VOLL
    curtailment: float = DEFAULT_CURTAILMENT_COST

    def check_ordering(self, grid: GridModel) -> None:
        """VOLL > curtailment > every generation cost."""
        top = max((g.marginal_cost for g in grid.generators), default=0.0)
        if not self.value_of_lost_load > self.curtailment > top:
            raise InvariantViolation(
                f"cost ordering violated: VOLL {self.value_of_lost_load} > curtailment "
                f"{self.curtailment} > max generation cost {top} must hold"
            )


@dataclass(frozen=True)
class PreviousDispatch:
    """What the previous step left behind for the units of the grid."""

    output: dict[str, float] = field(default_factory=dict)
    commitment: dict[str, int] = field(default_factory=dict)
    starting: frozenset[str] = frozenset()


@dataclass(frozen=True)
class DispatchUnit:
    id: str
    bus: str
    committable: bool
    eligible: bool
    lo: float  # MW floor when committed
    hi: float  # MW ceiling when committed
    cost: float
    p_avail: float
    p_prev: float = 0.0
    u_prev: int = 0
    ramp_mw: float = float("inf")  # per step

    @property
    def curtailable(self) -> bool:
        return not self.committable


@dataclass(frozen=True)
class DispatchLoad:
    feeder_id: str
    bus: str
    net_demand: float  # MW after BTM netting


@dataclass(frozen=True)
class DispatchProblem:
    grid: GridModel
    sub: SubGrid
    units: tuple[DispatchUnit, ...]
    loads: tuple[DispatchLoad, ...]
    dt_minutes: float
    costs: DispatchCosts
    first_step: bool = False

    def __post_init__(self):
        if self.dt_minutes <= 0:
            raise InvariantViolation("dispatch step length must be positive")

    @cached_property
    def bus_load(self) -> dict[str, float]:
        out = {b: 0.0 for b in self.sub.buses}
        for ld in self.loads:
            out[ld.bus] += ld.net_demand
        return out

    @property
    def total_load(self) -> float:
        return sum(ld.net_demand for ld in self.loads)

    @property
    def commit_units(self) -> tuple[DispatchUnit, ...]:
        """Units carrying a binary commitment decision."""
        return tuple(u for u in self.units if u.committable and u.eligible)


@dataclass
class DispatchSolution:
    commitment: dict[str, int]
    output: dict[str, float]
    shed: dict[str, float]  # per feeder
    objective: float
    status: DispatchStatus
    flows: dict[str, float] = field(default_factory=dict)
    starting: frozenset[str] = frozenset()

    @property
    def total_shed(self) -> float:
        return sum(self.shed.values())


def net_feeder_demand(demand: float, btm_output: float) -> float:
    """BTM output offsets demand; the excess is spilled, never exported."""
    return max(demand - btm_output, 0.0)


def build_problem(
    grid: GridModel,
    sub: SubGrid,
    availability: dict[str, float],
    feeder_demand: dict[str, float],
    prev: Optional[PreviousDispatch],
    dt_minutes: float,
    costs: DispatchCosts = DispatchCosts(),
) -> DispatchProblem:
    """Assemble the operation problem of one functional sub-grid.

    `feeder_demand` is gross demand per intact feeder; `availability` includes
    the BTM units. Without a previous dispatch every available unit may run
    anywhere between its minimum and its available capacity.
    """
    first = prev is None
    prev = prev or PreviousDispatch()

    units = []
    for gid in sub.generators:
        g = grid.generator_by_id[gid]
        avail = max(availability.get(gid, 0.0), 0.0)
        p_prev = prev.output.get(gid, 0.0)
        u_prev = prev.commitment.get(gid, 0)
        if not g.committable:
            units.append(DispatchUnit(gid, g.bus, False, avail > 0, 0.0, avail, g.marginal_cost, avail, p_prev, u_prev))
            continue
        ramp = g.ramp_rate * dt_minutes
        lo, hi, eligible = 0.0, 0.0, False
        if avail > 0:
            if first:
                lo, hi, eligible = min(g.p_min, avail), avail, True
            elif u_prev:
                lo = max(g.p_min, p_prev - ramp)
                hi = min(avail, p_prev + ramp)
                lo, eligible = min(lo, hi), True
            elif gid in prev.starting:
                lo = min(g.p_min, avail)
                hi = min(avail, g.p_min + ramp)
                eligible = True
        units.append(DispatchUnit(gid, g.bus, True, eligible, lo, hi, g.marginal_cost, avail, p_prev, u_prev, ramp))

    loads = []
    for fid in sub.feeders:
        f = grid.feeder_by_id[fid]
        btm = availability.get(f.btm_unit_id, 0.0)
        loads.append(DispatchLoad(fid, f.substation_bus, net_feeder_demand(feeder_demand.get(fid, 0.0), btm)))

    return DispatchProblem(grid, sub, tuple(units), tuple(loads), dt_minutes, costs, first_step=first)
