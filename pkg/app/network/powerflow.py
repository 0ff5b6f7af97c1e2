"""DC power flow on one sub-grid: B-theta with the slack angle fixed at zero."""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from app.errors import InvariantViolation, SingularSystem
from app.grid.base import GridModel
from app.network.subgrids import SubGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSolution:
    flows: dict[str, float]  # MW, positive from -> to
    angles: dict[str, float]  # rad, slack = 0
    injections: dict[str, float]  # MW after the slack took up the residual

    def residuals(self, grid: GridModel) -> dict[str, float]:
        """Injection minus net outflow per bus (MW)."""
        out = dict(self.injections)
        for lid, f in self.flows.items():
            ln = grid.line_by_id[lid]
            out[ln.from_bus] -= f
            out[ln.to_bus] += f
        return out


def susceptance_matrix(grid: GridModel, buses: list[str], lines: list[str]) -> sparse.csr_matrix:
    """Nodal B matrix (per unit) over the given buses and lines."""
    idx = {b: i for i, b in enumerate(buses)}
    rows, cols, data = [], [], []
    for lid in lines:
        ln = grid.line_by_id[lid]
        f, t = idx[ln.from_bus], idx[ln.to_bus]
        b = 1.0 / ln.reactance
        rows += [f, t, f, t]
        cols += [f, t, t, f]
        data += [b, b, -b, -b]
    n = len(buses)
    return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def dc_power_flow(grid: GridModel, sub: SubGrid, injections: dict[str, float]) -> FlowSolution:
    """Solve bus angles and line flows for net injections (MW) per bus.

    The slack bus takes whatever makes the injections sum to zero; callers are
    expected to hand over injections that already nearly balance.
    """
    buses = list(sub.buses)
    if not buses:
        return FlowSolution({}, {}, {})
    slack = sub.slack or buses[0]
    if slack not in sub.bus_set:
        raise InvariantViolation(f"slack bus '{slack}' is not in the sub-grid")

    base = grid.system_base
    p = np.array([injections.get(b, 0.0) for b in buses], dtype=float)
    s = buses.index(slack)
    p[s] = -(p.sum() - p[s])

    theta = np.zeros(len(buses))
    if len(buses) > 1:
        keep = [i for i in range(len(buses)) if i != s]
        b_matrix = susceptance_matrix(grid, buses, list(sub.lines))
        reduced = b_matrix[keep][:, keep].tocsc()
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                solved = spsolve(reduced, p[keep] / base)
            except (MatrixRankWarning, RuntimeError) as e:
                raise SingularSystem(f"singular B matrix on sub-grid {sub.key}: {e}")
        solved = np.atleast_1d(solved)
        if not np.all(np.isfinite(solved)):
            raise SingularSystem(f"non-finite angles on sub-grid {sub.key}")
        theta[keep] = solved

    angle = dict(zip(buses, theta.tolist()))
    flows = {}
    for lid in sub.lines:
        ln = grid.line_by_id[lid]
        flows[lid] = (angle[ln.from_bus] - angle[ln.to_bus]) / ln.reactance * base
    return FlowSolution(flows=flows, angles=angle, injections=dict(zip(buses, p.tolist())))
