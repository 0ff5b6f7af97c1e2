from dataclasses import dataclass

from app.dispatch.problem import DispatchProblem, DispatchSolution
from app.grid.base import GridModel


@dataclass(frozen=True)
class FeederService:
    feeder_id: str
    net_demand: float
    shed: float
    out_fraction: float  # share of the feeder's customers without power
    customers_out: float

    @property
    def served(self) -> float:
        return self.net_demand - self.shed


def apply_solution(grid: GridModel, problem: DispatchProblem, solution: DispatchSolution) -> dict[str, FeederService]:
    """Per-feeder service of a solved sub-grid; customers out scale with the shed fraction."""
    out = {}
    for ld in problem.loads:
        f = grid.feeder_by_id[ld.feeder_id]
        shed = min(max(solution.shed.get(ld.feeder_id, 0.0), 0.0), ld.net_demand)
        fraction = min(shed / ld.net_demand, 1.0) if ld.net_demand > 0 else 0.0
        out[ld.feeder_id] = FeederService(ld.feeder_id, ld.net_demand, shed, fraction, f.customers * fraction)
    return out


def failed_feeder_service(grid: GridModel, feeder_id: str, net_demand: float = 0.0) -> FeederService:
    """A feeder that is down or outside any serving sub-grid: every customer is out."""
    f = grid.feeder_by_id[feeder_id]
    return FeederService(feeder_id, net_demand, net_demand, 1.0, float(f.customers))
