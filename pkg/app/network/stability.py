"""Power-imbalance and maximum-RoCoF screen of sub-grids after a topology change."""

import math
from dataclasses import dataclass

from app.grid.base import GridModel
from app.network.subgrids import SubGrid

DEFAULT_ROCOF_LIMIT = 2.0  # Hz/s


@dataclass(frozen=True)
class StabilityVerdict:
    subgrid: SubGrid
    imbalance: float  # MW
    rocof: float  # Hz/s
    stable: bool


def power_imbalance(sub: SubGrid, generation: dict[str, float], demand: dict[str, float]) -> float:
    """Total generation minus total served demand over the sub-grid (MW)."""
    return sum(generation.get(g, 0.0) for g in sub.generators) - sum(demand.get(f, 0.0) for f in sub.feeders)


def synchronous_inertia(grid: GridModel, sub: SubGrid, committed: frozenset[str]) -> float:
    """Sum of 2 * H * P_nom over committed synchronous units (MW s)."""
    total = 0.0
    for gid in sub.generators:
        g = grid.generator_by_id[gid]
        if g.synchronous and gid in committed:
            total += 2.0 * g.inertia * g.p_max
    return total


def max_rocof(imbalance: float, inertia_mws: float, f0: float) -> float:
    if inertia_mws <= 0.0:
        if imbalance == 0.0:
            return 0.0
        return math.copysign(math.inf, imbalance)
    return f0 * imbalance / inertia_mws


def stability_screen(
    grid: GridModel,
    subgrids: tuple[SubGrid, ...],
    generation: dict[str, float],
    demand: dict[str, float],
    committed: frozenset[str],
    rocof_limit: float = DEFAULT_ROCOF_LIMIT,
) -> tuple[list[SubGrid], list[SubGrid], list[StabilityVerdict]]:
    """Split functional sub-grids into survivors (|RoCoF| <= limit) and removed ones."""
    surviving, removed, verdicts = [], [], []
    for sub in subgrids:
        if not sub.functional:
            continue
        imbalance = power_imbalance(sub, generation, demand)
        rocof = max_rocof(imbalance, synchronous_inertia(grid, sub, committed), grid.frequency)
        stable = abs(rocof) <= rocof_limit
        verdicts.append(StabilityVerdict(sub, imbalance, rocof, stable))
        (surviving if stable else removed).append(sub)
    return surviving, removed, verdicts
