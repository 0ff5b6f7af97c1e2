"""Per-realization records: events, trajectories and the derived failure metrics."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

BLACKOUT_TOL = 1e-9


class EventKind(str, Enum):
    COMPONENT_FAILED = "component_failed"
    LINE_TRIPPED_OVERLOAD = "line_tripped_overload"
    SUBGRID_REMOVED_ROCOF = "subgrid_removed_rocof"
    SHED_CHANGE = "shed_change"
    GENERATION_ISOLATED = "generation_isolated"


@dataclass(frozen=True)
class Event:
    step: int
    kind: EventKind
    component: str
    magnitude: float


@dataclass(frozen=True)
class FlowRecord:
    step: int
    line_id: str
    flow_mw: float
    rating_mw: float
    tripped: bool


@dataclass
class RealizationResult:
    index: int
    seed: int
    performance: list[float]
    served_mw: list[float]
    shed_mw: list[float]
    events: list[Event]
    blackout_step: Optional[int]
    largest_failure: tuple[int, float]
    line_failure_steps: dict[str, int] = field(default_factory=dict)
    region_performance: dict[str, list[float]] = field(default_factory=dict)
    solar_actual_mw: list[float] = field(default_factory=list)
    solar_clear_sky_mw: list[float] = field(default_factory=list)
    flow_log: list[FlowRecord] = field(default_factory=list)

    @property
    def final_performance(self) -> float:
        return self.performance[-1]


def largest_failure(performance: list[float]) -> tuple[int, float]:
    """(step, drop) of the largest decrease between consecutive steps; earliest on ties, (0, 0.0) if none."""
    best_step, best_drop = 0, 0.0
    for k in range(1, len(performance)):
        drop = performance[k - 1] - performance[k]
        if drop > best_drop:
            best_step, best_drop = k, drop
    return best_step, best_drop


def blackout_step(performance: list[float]) -> Optional[int]:
    for k, p in enumerate(performance):
        if p <= BLACKOUT_TOL:
            return k
    return None
