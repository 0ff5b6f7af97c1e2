from dataclasses import dataclass
from functools import cached_property

import numpy as np

from app.errors import InvariantViolation, UnknownComponent
from app.vulnerability.resistance import ResistanceAssignment

INTACT = -1


@dataclass(frozen=True, eq=False)
class DamageState:
    """Failure step per component (INTACT while standing). Failure is absorbing."""

    component_ids: tuple[str, ...]
    failure_step: np.ndarray

    @classmethod
    def intact(cls, component_ids: tuple[str, ...]) -> "DamageState":
        return cls(component_ids, np.full(len(component_ids), INTACT, dtype=int))

    @cached_property
    def index(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.component_ids)}

    @property
    def failed(self) -> np.ndarray:
        return self.failure_step != INTACT

    def is_failed(self, component_id: str) -> bool:
        i = self.index.get(component_id)
        if i is None:
            raise UnknownComponent(component_id)
        return bool(self.failure_step[i] != INTACT)

    def failed_ids(self) -> set[str]:
        return {cid for cid, s in zip(self.component_ids, self.failure_step) if s != INTACT}

    def failed_at(self, step: int) -> list[str]:
        return [cid for cid, s in zip(self.component_ids, self.failure_step) if s == step]


def update_damage(state: DamageState, assignment: ResistanceAssignment, winds: np.ndarray, step: int) -> DamageState:
    """Fail every intact component whose wind exceeds its resistance at this step.

    `winds` is aligned with the assignment's components.
    """
    if step < 0:
        raise InvariantViolation("step must be non-negative")
    if state.component_ids != assignment.component_ids:
        raise InvariantViolation("damage state and resistance assignment cover different components")
    newly = (state.failure_step == INTACT) & (np.asarray(winds) > assignment.resistance)
    if not newly.any():
        return state
    failure_step = state.failure_step.copy()
    failure_step[newly] = step
    return DamageState(state.component_ids, failure_step)
