"""
One seeded realization over the event horizon.

Each step runs, in order: damage update, sub-grid identification, overload
cascade on the previous dispatch, imbalance/RoCoF screen, dispatch of the
surviving sub-grids, and service bookkeeping. Once every customer is out the
remaining steps record zero performance while damage keeps accruing.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from app.dispatch.apply import FeederService, apply_solution, failed_feeder_service
from app.dispatch.lpdump import dump_problem
from app.dispatch.problem import DispatchCosts, DispatchProblem, PreviousDispatch, build_problem, net_feeder_demand
from app.dispatch.solver import solve_dispatch, start_units
from app.errors import InfeasibleDispatch, InvariantViolation, SingularSystem
from app.grid.base import GridModel
from app.grid.components import DEFAULT_TOWER_SPACING_KM, ComponentClass
from app.hazard.exposure import HazardExposure
from app.network.cascade import TripRule, cascade
from app.network.stability import DEFAULT_ROCOF_LIMIT, stability_screen
from app.network.subgrids import SubGrid, Topology, find_subgrids
from app.simulation.state import (
    BLACKOUT_TOL,
    Event,
    EventKind,
    FlowRecord,
    RealizationResult,
    largest_failure,
)
from app.vulnerability.damage import DamageState, update_damage
from app.vulnerability.fragility import FragilityCurve
from app.vulnerability.generation import available_generation, distributed_solar_tally
from app.vulnerability.resistance import preset_resistance_rank, sample_resistances

logger = logging.getLogger(__name__)

SERVICE_TOL = 1e-9


@dataclass(frozen=True)
class SimulationParams:
    step_minutes: float = 10.0
    rocof_limit: float = DEFAULT_ROCOF_LIMIT
    trip_probability: float = 0.0
    costs: DispatchCosts = DispatchCosts()
    tower_spacing_km: float = DEFAULT_TOWER_SPACING_KM
    exact_dispatch: Optional[bool] = None
    record_flows: bool = False
    lp_dump_dir: Optional[str] = None  # write every dispatch problem here in LP format


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything a realization needs besides its seed; shared read-only across realizations."""

    grid: GridModel
    exposure: HazardExposure
    curves: dict[ComponentClass, FragilityCurve]
    params: SimulationParams = SimulationParams()


@dataclass
class _Dispatched:
    output: dict[str, float] = field(default_factory=dict)
    commitment: dict[str, int] = field(default_factory=dict)
    starting: set[str] = field(default_factory=set)
    services: dict[str, FeederService] = field(default_factory=dict)


class _Run:
    def __init__(self, scenario: Scenario, seed: int, index: int, preset: Optional[tuple[str, float]]):
        self.grid = scenario.grid
        self.exposure = scenario.exposure
        self.params = scenario.params
        self.seed = seed
        self.index = index

        assignment = sample_resistances(self.grid, scenario.curves, seed, self.params.tower_spacing_km)
        if preset is not None:
            assignment = preset_resistance_rank(assignment, *preset)
        if assignment.component_ids != self.exposure.component_ids:
            raise InvariantViolation("hazard exposure was built for a different component set")
        self.assignment = assignment
        self.damage = DamageState.intact(assignment.component_ids)

        self.line_ids = frozenset(ln.id for ln in self.grid.lines)
        self.feeder_ids = frozenset(f.id for f in self.grid.feeders)
        self.tripped: set[str] = set()
        self.dead_buses: set[str] = set()
        self.isolated: set[str] = set()
        self.shed_fraction = {f.id: 0.0 for f in self.grid.feeders}
        self.out_fraction = {f.id: 0.0 for f in self.grid.feeders}
        self.prev = PreviousDispatch()
        self.blackout: Optional[int] = None

        self.events: list[Event] = []
        self.line_failures: dict[str, int] = {}
        self.performance: list[float] = []
        self.served_mw: list[float] = []
        self.shed_mw: list[float] = []
        self.region_performance: dict[str, list[float]] = {r: [] for r in self.grid.regions}
        self.solar_actual: list[float] = []
        self.solar_clear: list[float] = []
        self.flow_log: list[FlowRecord] = []

    # --- helpers ---

    def _failed_feeders(self) -> frozenset[str]:
        return frozenset(self.damage.failed_ids() & self.feeder_ids)

    def _topology(self, committed: frozenset[str]) -> Topology:
        failed = self.damage.failed_ids()
        return Topology(
            out_lines=frozenset((failed & self.line_ids) | self.tripped),
            dead_buses=frozenset(self.dead_buses),
            failed_feeders=frozenset(failed & self.feeder_ids),
            offline_generators=frozenset(self.isolated),
            committed=committed,
        )

    def _gross_demand(self, step: int) -> dict[str, float]:
        failed = self._failed_feeders()
        return {f.id: f.demand(step) for f in self.grid.feeders if f.id not in failed}

    def _net_demand(self, step: int, avail: dict[str, float]) -> dict[str, float]:
        return {
            fid: net_feeder_demand(d, avail.get(self.grid.feeder_by_id[fid].btm_unit_id, 0.0))
            for fid, d in self._gross_demand(step).items()
        }

    def _dispatch(self, step: int, subs: list[SubGrid], avail: dict[str, float], prev: Optional[PreviousDispatch]) -> _Dispatched:
        out = _Dispatched()
        demand = self._gross_demand(step)
        for sub in subs:
            try:
                problem = build_problem(self.grid, sub, avail, demand, prev, self.params.step_minutes, self.params.costs)
                if self.params.lp_dump_dir:
                    self._dump(step, problem)
                solution = solve_dispatch(problem, exact=self.params.exact_dispatch)
            except (InfeasibleDispatch, SingularSystem, ValueError) as e:
                logger.warning(f"Realization {self.index} step {step}: dispatch failed on sub-grid {sub.key} ({e}); sub-grid left unserved")
                continue
            out.output.update(solution.output)
            out.commitment.update(solution.commitment)
            out.starting |= start_units(problem, solution)
            out.services.update(apply_solution(self.grid, problem, solution))
        return out

    def _dump(self, step: int, problem: DispatchProblem) -> None:
        d = Path(self.params.lp_dump_dir)
        d.mkdir(parents=True, exist_ok=True)
        stage = "init" if problem.first_step else f"s{step:04d}"
        name = f"r{self.index:06d}_{stage}_{problem.sub.key}.lp"
        (d / name).write_text(dump_problem(problem), encoding="utf-8")

    def _carry(self, dispatched: _Dispatched) -> None:
        self.prev = PreviousDispatch(
            output=dispatched.output,
            commitment=dispatched.commitment,
            starting=frozenset(dispatched.starting),
        )
        for fid in self.feeder_ids:
            svc = dispatched.services.get(fid)
            self.shed_fraction[fid] = svc.out_fraction if svc is not None else 1.0

    # --- pipeline ---

    def initialize(self) -> None:
        """Pre-event dispatch at the first step's conditions on the intact grid."""
        avail = available_generation(self.grid, self.damage, self.exposure, 0)
        subs = [s for s in find_subgrids(self.grid, Topology()) if s.functional]
        dispatched = self._dispatch(0, subs, avail, None)
        self._carry(dispatched)

    def step(self, k: int) -> None:
        winds = self.exposure.component_wind[k]
        self.damage = update_damage(self.damage, self.assignment, winds, k)
        for cid in self.damage.failed_at(k):
            self.events.append(Event(k, EventKind.COMPONENT_FAILED, cid, float(winds[self.assignment.index[cid]])))
            if cid in self.line_ids:
                self.line_failures.setdefault(cid, k)

        avail = available_generation(self.grid, self.damage, self.exposure, k, frozenset(self.dead_buses))
        tally = distributed_solar_tally(self.grid, avail, self.exposure, k)
        self.solar_actual.append(tally.actual_mw)
        self.solar_clear.append(tally.clear_sky_mw)

        net_demand = self._net_demand(k, avail)
        if self.blackout is not None:
            self._record(k, {}, net_demand)
            return

        committed = frozenset(
            g for g, u in self.prev.commitment.items() if u and g not in self.isolated
        )
        generation = {
            g.id: min(self.prev.output.get(g.id, 0.0), avail.get(g.id, 0.0))
            for g in self.grid.generators
            if g.id not in self.isolated
        }
        demand = {fid: d * (1.0 - self.shed_fraction.get(fid, 0.0)) for fid, d in net_demand.items()}

        bus_gen: dict[str, float] = {}
        for gid, p in generation.items():
            bus = self.grid.generator_by_id[gid].bus
            bus_gen[bus] = bus_gen.get(bus, 0.0) + p
        bus_dem: dict[str, float] = {}
        for fid, d in demand.items():
            bus = self.grid.feeder_by_id[fid].substation_bus
            bus_dem[bus] = bus_dem.get(bus, 0.0) + d

        rule = TripRule(self.params.trip_probability, self.seed, k)
        result = cascade(self.grid, self._topology(committed), bus_gen, bus_dem, rule)
        tripped_now = set()
        for trip in result.trips:
            self.tripped.add(trip.line_id)
            tripped_now.add(trip.line_id)
            self.line_failures.setdefault(trip.line_id, k)
            self.events.append(Event(k, EventKind.LINE_TRIPPED_OVERLOAD, trip.line_id, abs(trip.flow)))
        if self.params.record_flows:
            for lid, f in sorted(result.flows.items()):
                ln = self.grid.line_by_id[lid]
                self.flow_log.append(FlowRecord(k, lid, f, ln.rating, lid in tripped_now))

        for sub in result.subgrids:
            if sub.functional:
                continue
            for gid in sub.generators:
                if gid not in self.isolated:
                    self.isolated.add(gid)
                    self.events.append(Event(k, EventKind.GENERATION_ISOLATED, gid, self.prev.output.get(gid, 0.0)))

        candidates = tuple(s for s in result.subgrids if s.functional and s.key not in result.singular)
        surviving, removed, verdicts = stability_screen(
            self.grid, candidates, generation, demand, committed, self.params.rocof_limit
        )
        rocof_of = {v.subgrid.key: v.rocof for v in verdicts}
        for sub in removed:
            self.dead_buses |= set(sub.buses)
            self.events.append(Event(k, EventKind.SUBGRID_REMOVED_ROCOF, sub.key, rocof_of[sub.key]))
            logger.debug(f"Realization {self.index} step {k}: sub-grid {sub.key} removed, RoCoF {rocof_of[sub.key]:.3f} Hz/s")

        dispatched = self._dispatch(k, surviving, avail, self.prev)
        self._record(k, dispatched.services, net_demand)
        self._carry(dispatched)

    def _record(self, k: int, services: dict[str, FeederService], net_demand: dict[str, float]) -> None:
        failed = self._failed_feeders()
        total = self.grid.total_customers
        region_out: dict[str, float] = {r: 0.0 for r in self.grid.regions}
        region_total: dict[str, float] = {r: 0.0 for r in self.grid.regions}
        out_customers = served = shed = 0.0

        for f in self.grid.feeders:
            down = f.id in failed
            svc = None if down else services.get(f.id)
            if svc is None:
                # failed feeders carry no net demand; unserved intact ones shed all of theirs
                svc = failed_feeder_service(self.grid, f.id, net_demand.get(f.id, 0.0))
            served += svc.served
            shed += svc.shed
            frac = svc.out_fraction
            if not down and abs(frac - self.out_fraction[f.id]) > SERVICE_TOL:
                self.events.append(Event(k, EventKind.SHED_CHANGE, f.id, frac - self.out_fraction[f.id]))
            self.out_fraction[f.id] = frac
            out_customers += svc.customers_out
            region = self.grid.feeder_region(f)
            if region:
                region_out[region] += svc.customers_out
                region_total[region] += f.customers

        performance = 1.0 if total == 0 else min(max(1.0 - out_customers / total, 0.0), 1.0)
        if self.blackout is not None or (total > 0 and performance <= BLACKOUT_TOL):
            performance = 0.0
            if self.blackout is None:
                self.blackout = k
                logger.debug(f"Realization {self.index}: blackout at step {k}")
        self.performance.append(performance)
        self.served_mw.append(served)
        self.shed_mw.append(shed)
        for r in self.grid.regions:
            if self.blackout is not None:
                self.region_performance[r].append(0.0)
            else:
                self.region_performance[r].append(1.0 - region_out[r] / region_total[r] if region_total[r] > 0 else 1.0)

    def result(self) -> RealizationResult:
        return RealizationResult(
            index=self.index,
            seed=self.seed,
            performance=self.performance,
            served_mw=self.served_mw,
            shed_mw=self.shed_mw,
            events=self.events,
            blackout_step=self.blackout,
            largest_failure=largest_failure(self.performance),
            line_failure_steps=self.line_failures,
            region_performance=self.region_performance,
            solar_actual_mw=self.solar_actual,
            solar_clear_sky_mw=self.solar_clear,
            flow_log=self.flow_log,
        )


def run_realization(
    scenario: Scenario,
    seed: int,
    index: int = 0,
    preset: Optional[tuple[str, float]] = None,
) -> RealizationResult:
    """Simulate one realization; `preset` pins one component's resistance rank."""
    run = _Run(scenario, seed, index, preset)
    run.initialize()
    for k in range(scenario.exposure.n_steps):
        run.step(k)
    return run.result()
