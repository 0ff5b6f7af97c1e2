"""Solver-independent feasibility check of a dispatch solution."""

from app.dispatch.problem import DispatchProblem, DispatchSolution
from app.errors import SingularSystem
from app.network.powerflow import dc_power_flow

BALANCE_TOL = 1e-6  # MW
BOUND_TOL = 1e-6  # MW


def check_solution(problem: DispatchProblem, solution: DispatchSolution, tol: float = BOUND_TOL) -> list[str]:
    """Every violated constraint as a readable message; empty when feasible."""
    problems: list[str] = []

    for u in problem.units:
        p = solution.output.get(u.id, 0.0)
        on = solution.commitment.get(u.id, 0)
        if not u.eligible:
            if abs(p) > tol or (u.committable and on):
                problems.append(f"{u.id}: not eligible this step but p={p:.6g}, u={on}")
            continue
        if u.committable:
            lo, hi = (u.lo, u.hi) if on else (0.0, 0.0)
        else:
            lo, hi = 0.0, u.hi
        if p < lo - tol or p > hi + tol:
            problems.append(f"{u.id}: output {p:.6g} outside [{lo:.6g}, {hi:.6g}]")
        if u.committable and on and u.u_prev and not problem.first_step and abs(p - u.p_prev) > u.ramp_mw + tol:
            problems.append(f"{u.id}: ramp {p - u.p_prev:.6g} exceeds {u.ramp_mw:.6g}")

    for ld in problem.loads:
        s = solution.shed.get(ld.feeder_id, 0.0)
        if s < -tol or s > ld.net_demand + tol:
            problems.append(f"{ld.feeder_id}: shed {s:.6g} outside [0, {ld.net_demand:.6g}]")

    injection = {b: 0.0 for b in problem.sub.buses}
    for u in problem.units:
        injection[u.bus] += solution.output.get(u.id, 0.0)
    for ld in problem.loads:
        injection[ld.bus] -= ld.net_demand - solution.shed.get(ld.feeder_id, 0.0)
    residual = sum(injection.values())
    if abs(residual) > BALANCE_TOL:
        problems.append(f"power balance residual {residual:.3g} MW")
        return problems

    try:
        flows = dc_power_flow(problem.grid, problem.sub, injection).flows
    except SingularSystem as e:
        problems.append(e.message)
        return problems
    for lid, f in flows.items():
        limit = problem.grid.line_by_id[lid].emergency_rating
        if abs(f) > limit + tol:
            problems.append(f"{lid}: flow {f:.6g} MW exceeds emergency rating {limit:.6g}")
    return problems
