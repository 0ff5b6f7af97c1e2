"""
Plain-text LP-format rendering of a dispatch problem, for cross-checking
against external optimizers. Variables: p_<unit>, u_<unit>, s_<bus>, th_<bus>.
"""

import re

import numpy as np

from app.dispatch.problem import DispatchProblem


def _name(prefix: str, ident: str) -> str:
    return f"{prefix}_{re.sub(r'[^A-Za-z0-9_]', '_', ident)}"


def _terms(pairs: list[tuple[float, str]]) -> str:
    out = []
    for coef, var in pairs:
        sign = "-" if coef < 0 else "+"
        out.append(f"{sign} {abs(coef)!r} {var}")
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else text


def dump_problem(problem: DispatchProblem) -> str:
    costs = problem.costs
    base = problem.grid.system_base
    load = problem.bus_load
    slack = problem.sub.slack or problem.sub.buses[0]
    commit = problem.commit_units

    objective = []
    for u in problem.units:
        coef = u.cost - (costs.curtailment if u.curtailable else 0.0)
        objective.append((coef, _name("p", u.id)))
    objective += [(costs.value_of_lost_load, _name("s", b)) for b in problem.sub.buses]

    lines = [f"\\ dispatch of sub-grid {problem.sub.key}, step length {problem.dt_minutes} min", "Minimize"]
    lines.append(f" obj: {_terms(objective)}")
    lines.append("Subject To")

    balance: dict[str, list[tuple[float, str]]] = {b: [] for b in problem.sub.buses}
    for u in problem.units:
        balance[u.bus].append((1.0, _name("p", u.id)))
    for b in problem.sub.buses:
        balance[b].append((1.0, _name("s", b)))
    for lid in problem.sub.lines:
        ln = problem.grid.line_by_id[lid]
        k = base / ln.reactance
        balance[ln.from_bus] += [(-k, _name("th", ln.from_bus)), (k, _name("th", ln.to_bus))]
        balance[ln.to_bus] += [(-k, _name("th", ln.to_bus)), (k, _name("th", ln.from_bus))]
    for b in problem.sub.buses:
        lines.append(f" {_name('bal', b)}: {_terms(balance[b])} = {load[b]!r}")

    for u in commit:
        lines.append(f" {_name('up', u.id)}: {_terms([(1.0, _name('p', u.id)), (-u.hi, _name('u', u.id))])} <= 0")
        lines.append(f" {_name('lo', u.id)}: {_terms([(1.0, _name('p', u.id)), (-u.lo, _name('u', u.id))])} >= 0")
    for lid in problem.sub.lines:
        ln = problem.grid.line_by_id[lid]
        if not np.isfinite(ln.emergency_rating):
            continue
        k = base / ln.reactance
        flow = _terms([(k, _name("th", ln.from_bus)), (-k, _name("th", ln.to_bus))])
        lines.append(f" {_name('fmax', lid)}: {flow} <= {ln.emergency_rating!r}")
        lines.append(f" {_name('fmin', lid)}: {flow} >= {-ln.emergency_rating!r}")

    lines.append("Bounds")
    for u in problem.units:
        lines.append(f" 0 <= {_name('p', u.id)} <= {(u.hi if u.eligible else 0.0)!r}")
    for b in problem.sub.buses:
        lines.append(f" 0 <= {_name('s', b)} <= {load[b]!r}")
        lines.append(f" {_name('th', b)} = 0" if b == slack else f" {_name('th', b)} free")
    if commit:
        lines.append("Binaries")
        lines.append(" " + " ".join(_name("u", u.id) for u in commit))
    lines.append("End")
    return "\n".join(lines) + "\n"
