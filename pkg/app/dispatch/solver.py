"""
Commitment and dispatch solver.

The inner problem is a linear program over unit outputs, bus shedding and bus
angles solved with HiGHS. Commitments of thermal and hydro units are decided
by depth-first branch and bound over the LP relaxation on small instances and
by merit-order commitment otherwise.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from app.config import settings
from app.dispatch.problem import DispatchProblem, DispatchSolution, DispatchStatus
from app.errors import InfeasibleDispatch
from app.network.powerflow import dc_power_flow

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
MAX_NODES = 4096


def _csr(entries: list[tuple[int, int, float]], n_rows: int, n_cols: int) -> sparse.csr_matrix:
    rows, cols, vals = zip(*entries) if entries else ((), (), ())
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))


@dataclass
class _LPResult:
    x: np.ndarray
    objective: float


class _Layout:
    """Column layout of the LP: outputs, commitments, bus shedding, bus angles."""

    def __init__(self, problem: DispatchProblem):
        self.problem = problem
        self.units = problem.units
        self.commit = [i for i, u in enumerate(self.units) if u.committable and u.eligible]
        self.buses = list(problem.sub.buses)
        self.bus_idx = {b: i for i, b in enumerate(self.buses)}
        self.n_p = len(self.units)
        self.n_u = len(self.commit)
        self.n_b = len(self.buses)
        self.p0, self.u0 = 0, self.n_p
        self.s0 = self.u0 + self.n_u
        self.t0 = self.s0 + self.n_b
        self.n = self.t0 + self.n_b

    def build(self):
        pr = self.problem
        costs = pr.costs
        base = pr.grid.system_base
        c = np.zeros(self.n)
        for i, u in enumerate(self.units):
            c[self.p0 + i] = u.cost - (costs.curtailment if u.curtailable else 0.0)
        c[self.s0:self.t0] = costs.value_of_lost_load

        load = pr.bus_load
        slack = pr.sub.slack or self.buses[0]
        bounds = []
        for u in self.units:
            bounds.append((0.0, u.hi if u.eligible else 0.0))
        bounds += [(0.0, 1.0)] * self.n_u
        bounds += [(0.0, load[b]) for b in self.buses]
        bounds += [(0.0, 0.0) if b == slack else (None, None) for b in self.buses]

        # nodal balance: sum p + s - base * (B theta) = L
        eq: list[tuple[int, int, float]] = []
        for i, u in enumerate(self.units):
            eq.append((self.bus_idx[u.bus], self.p0 + i, 1.0))
        for k in range(self.n_b):
            eq.append((k, self.s0 + k, 1.0))

        ub: list[tuple[int, int, float]] = []
        b_ub: list[float] = []
        for j, i in enumerate(self.commit):
            u = self.units[i]
            row = len(b_ub)
            ub += [(row, self.p0 + i, 1.0), (row, self.u0 + j, -u.hi)]
            ub += [(row + 1, self.p0 + i, -1.0), (row + 1, self.u0 + j, u.lo)]
            b_ub += [0.0, 0.0]

        for lid in pr.sub.lines:
            ln = pr.grid.line_by_id[lid]
            f, t = self.bus_idx[ln.from_bus], self.bus_idx[ln.to_bus]
            k = base / ln.reactance
            # flow f->t = k (theta_f - theta_t) leaves f and enters t
            eq += [(f, self.t0 + f, -k), (f, self.t0 + t, k), (t, self.t0 + t, -k), (t, self.t0 + f, k)]
            if not np.isfinite(ln.emergency_rating):
                continue
            for sign in (1.0, -1.0):
                row = len(b_ub)
                ub += [(row, self.t0 + f, sign * k), (row, self.t0 + t, -sign * k)]
                b_ub.append(ln.emergency_rating)

        a_eq = _csr(eq, self.n_b, self.n)
        b_eq = np.array([load[b] for b in self.buses])
        if not b_ub:
            return c, None, None, a_eq, b_eq, bounds
        return c, _csr(ub, len(b_ub), self.n), np.array(b_ub), a_eq, b_eq, bounds

    def constant(self) -> float:
        """Curtailment charge on the full renewable availability."""
        return self.problem.costs.curtailment * sum(u.p_avail for u in self.units if u.curtailable and u.eligible)


class _LP:
    def __init__(self, problem: DispatchProblem):
        self.layout = _Layout(problem)
        self.c, self.a_ub, self.b_ub, self.a_eq, self.b_eq, self.bounds = self.layout.build()

    def solve(self, u_lo: np.ndarray, u_hi: np.ndarray) -> Optional[_LPResult]:
        lay = self.layout
        bounds = list(self.bounds)
        for j in range(lay.n_u):
            bounds[lay.u0 + j] = (float(u_lo[j]), float(u_hi[j]))
        res = linprog(
            self.c,
            A_ub=self.a_ub,
            b_ub=self.b_ub,
            A_eq=self.a_eq,
            b_eq=self.b_eq,
            bounds=bounds,
            method="highs",
        )
        if res.status != 0:
            return None
        return _LPResult(res.x, float(res.fun) + lay.constant())


def _fractional(x: np.ndarray, lay: _Layout) -> Optional[int]:
    """Index of the most fractional commitment, or None when all are integral."""
    if lay.n_u == 0:
        return None
    u = x[lay.u0:lay.u0 + lay.n_u]
    dist = np.abs(u - np.round(u))
    j = int(np.argmax(dist))
    return j if dist[j] > INTEGRALITY_TOL else None


def _to_solution(problem: DispatchProblem, lp: _LP, x: np.ndarray, status: DispatchStatus) -> DispatchSolution:
    lay = lp.layout
    commit_of = {lay.commit[j]: int(round(x[lay.u0 + j])) for j in range(lay.n_u)}

    output, commitment = {}, {}
    for i, u in enumerate(problem.units):
        if u.committable:
            on = commit_of.get(i, 0)
            p = float(np.clip(x[lay.p0 + i], u.lo, u.hi)) if on else 0.0
        else:
            on = 1 if u.eligible else 0
            p = float(np.clip(x[lay.p0 + i], 0.0, u.hi)) if on else 0.0
        output[u.id], commitment[u.id] = p, on

    load = problem.bus_load
    bus_shed = {b: float(np.clip(x[lay.s0 + k], 0.0, load[b])) for k, b in enumerate(lay.buses)}
    _polish(problem, output, bus_shed)

    shed = {}
    for ld in problem.loads:
        total = load[ld.bus]
        shed[ld.feeder_id] = bus_shed[ld.bus] * ld.net_demand / total if total > 0 else 0.0

    injection = {b: bus_shed[b] - load[b] for b in lay.buses}
    for u in problem.units:
        injection[u.bus] += output[u.id]
    # flows of the polished injections, not of the LP angles
    flows = dc_power_flow(problem.grid, problem.sub, injection).flows

    return DispatchSolution(
        commitment=commitment,
        output=output,
        shed=shed,
        objective=objective_value(problem, output, shed),
        status=status,
        flows=flows,
    )


def _polish(problem: DispatchProblem, output: dict[str, float], bus_shed: dict[str, float]) -> None:
    """Close the solver's residual total imbalance through shedding, then curtailable output."""
    load = problem.bus_load
    residual = sum(output.values()) + sum(bus_shed.values()) - sum(load.values())
    for b in sorted(bus_shed):
        if abs(residual) < 1e-12:
            return
        if residual > 0:
            delta = min(bus_shed[b], residual)
            bus_shed[b] -= delta
            residual -= delta
        else:
            delta = min(load[b] - bus_shed[b], -residual)
            bus_shed[b] += delta
            residual += delta
    for u in problem.units:
        if abs(residual) < 1e-12:
            return
        if not (u.curtailable and u.eligible):
            continue
        p = output[u.id]
        if residual > 0:
            delta = min(p, residual)
            output[u.id] = p - delta
            residual -= delta
        else:
            delta = min(u.hi - p, -residual)
            output[u.id] = p + delta
            residual += delta


def objective_value(problem: DispatchProblem, output: dict[str, float], shed: dict[str, float]) -> float:
    costs = problem.costs
    total = costs.value_of_lost_load * sum(shed.values())
    for u in problem.units:
        p = output.get(u.id, 0.0)
        total += u.cost * p
        if u.curtailable and u.eligible:
            total += costs.curtailment * (u.p_avail - p)
    return total


def _fixed(lp: _LP, on: set[int]) -> Optional[_LPResult]:
    lay = lp.layout
    u = np.array([1.0 if lay.commit[j] in on else 0.0 for j in range(lay.n_u)])
    return lp.solve(u, u)


def _merit_order(problem: DispatchProblem, lp: _LP) -> tuple[set[int], _LPResult]:
    """Commit eligible units cheapest-first until capacity covers net demand; drop units until feasible."""
    lay = lp.layout
    renewable = sum(u.hi for u in problem.units if u.curtailable and u.eligible)
    need = max(problem.total_load - renewable, 0.0)
    order = sorted(lay.commit, key=lambda i: (problem.units[i].cost, problem.units[i].id))
    on: list[int] = []
    capacity = 0.0
    for i in order:
        if capacity >= need:
            break
        on.append(i)
        capacity += problem.units[i].hi
    while True:
        res = _fixed(lp, set(on))
        if res is not None:
            return set(on), res
        if not on:
            raise InfeasibleDispatch(f"sub-grid {problem.sub.key}: shedding all load is infeasible")
        on.pop()


def _branch_and_bound(problem: DispatchProblem, lp: _LP, incumbent: _LPResult) -> tuple[_LPResult, bool]:
    """Depth-first search over commitments; returns (best, proven optimal)."""
    lay = lp.layout
    best = incumbent
    stack = [(np.zeros(lay.n_u), np.ones(lay.n_u))]
    nodes = 0
    while stack:
        if nodes >= MAX_NODES:
            logger.warning(f"Branch and bound node limit reached on sub-grid {problem.sub.key}")
            return best, False
        u_lo, u_hi = stack.pop()
        nodes += 1
        res = lp.solve(u_lo, u_hi)
        if res is None or res.objective >= best.objective - 1e-9 * max(1.0, abs(best.objective)):
            continue
        j = _fractional(res.x, lay)
        if j is None:
            best = res
            continue
        down_hi = u_hi.copy()
        down_hi[j] = 0.0
        up_lo = u_lo.copy()
        up_lo[j] = 1.0
        stack.append((u_lo, down_hi))
        stack.append((up_lo, u_hi))
    return best, True


def solve_dispatch(problem: DispatchProblem, exact: Optional[bool] = None) -> DispatchSolution:
    """Least-cost dispatch with shedding as the last resort.

    `exact` defaults to branch and bound when the number of commitment
    decisions is within settings.exact_unit_limit.
    """
    lp = _LP(problem)
    n_commit = lp.layout.n_u
    if exact is None:
        exact = n_commit <= settings.exact_unit_limit

    _, incumbent = _merit_order(problem, lp)
    status = DispatchStatus.HEURISTIC
    if exact and n_commit:
        incumbent, proven = _branch_and_bound(problem, lp, incumbent)
        status = DispatchStatus.OPTIMAL if proven else DispatchStatus.HEURISTIC
    elif n_commit == 0:
        status = DispatchStatus.OPTIMAL
    return _to_solution(problem, lp, incumbent.x, status)


def enumerate_commitments(problem: DispatchProblem) -> DispatchSolution:
    """Exhaustive commitment search; an oracle for small instances."""
    lp = _LP(problem)
    lay = lp.layout
    best: Optional[_LPResult] = None
    for bits in itertools.product((0, 1), repeat=lay.n_u):
        res = _fixed(lp, {lay.commit[j] for j, b in enumerate(bits) if b})
        if res is not None and (best is None or res.objective < best.objective):
            best = res
    if best is None:
        raise InfeasibleDispatch(f"sub-grid {problem.sub.key}: no feasible commitment")
    return _to_solution(problem, lp, best.x, DispatchStatus.OPTIMAL)


def start_units(problem: DispatchProblem, solution: DispatchSolution, tol: float = 1e-6) -> frozenset[str]:
    """Cheapest offline units whose capacity covers this step's shedding; they run from the next step."""
    deficit = solution.total_shed
    if deficit <= tol:
        return frozenset()
    candidates = sorted(
        (u for u in problem.units if u.committable and not u.eligible and u.p_avail > 0),
        key=lambda u: (u.cost, u.id),
    )
    started, capacity = [], 0.0
    for u in candidates:
        if capacity >= deficit:
            break
        started.append(u.id)
        capacity += u.p_avail
    return frozenset(started)
