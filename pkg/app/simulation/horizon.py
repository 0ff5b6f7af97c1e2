from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from functools import cached_property

from app.errors import ConfigError

DEFAULT_STEP_MINUTES = 10.0


@dataclass(frozen=True)
class Horizon:
    """Discretized event horizon: inclusive of both ends, fixed step length."""

    start: datetime
    end: datetime
    step_minutes: float = DEFAULT_STEP_MINUTES

    def __post_init__(self):
        if self.step_minutes <= 0:
            raise ConfigError("step_minutes must be positive")
        if self.start.tzinfo is None or self.end.tzinfo is None:
            raise ConfigError("horizon bounds must be timezone-aware (UTC)")
        if self.end < self.start:
            raise ConfigError("horizon end precedes start")

    @classmethod
    def event_day(cls, day: datetime, step_minutes: float = DEFAULT_STEP_MINUTES) -> "Horizon":
        """00:00 to 23:00 UTC of the given day (139 steps at 10 minutes)."""
        midnight = day.astimezone(timezone.utc).replace(hour=0, minute=0, second=0, microsecond=0)
        return cls(start=midnight, end=midnight + timedelta(hours=23), step_minutes=step_minutes)

    @cached_property
    def times(self) -> tuple[datetime, ...]:
        step = timedelta(minutes=self.step_minutes)
        out = []
        t = self.start
        while t <= self.end:
            out.append(t)
            t = t + step
        return tuple(out)

    @property
    def n_steps(self) -> int:
        return len(self.times)

    @property
    def step_hours(self) -> float:
        return self.step_minutes / 60.0

    def index_of(self, t: datetime) -> int | None:
        offset = (t - self.start).total_seconds() / 60.0
        k = round(offset / self.step_minutes)
        if 0 <= k < self.n_steps and self.times[k] == t:
            return k
        return None
