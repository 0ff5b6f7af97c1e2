"""
Solar output reduction under the storm's cloud shield, times a clear-sky
diurnal shape.
"""

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from app.errors import InvariantViolation
from app.hazard.geo import haversine_km
from app.hazard.track import StormTrack, state_at


@dataclass(frozen=True)
class SolarReductionParams:
    inner_radius_factor: float = 2.0
    outer_radius_factor: float = 10.0
    min_fraction: float = 0.2

    def __post_init__(self):
        if not 0 <= self.inner_radius_factor < self.outer_radius_factor:
            raise InvariantViolation("solar reduction requires 0 <= inner_radius_factor < outer_radius_factor")
        if not 0.0 <= self.min_fraction <= 1.0:
            raise InvariantViolation("solar min_fraction must lie in [0, 1]")

    def cloud_factor(self, d: np.ndarray | float) -> np.ndarray:
        """Remaining irradiance fraction at normalized distance d = r / rmax."""
        a, b, lo = self.inner_radius_factor, self.outer_radius_factor, self.min_fraction
        ramp = lo + (1.0 - lo) * (np.asarray(d, dtype=float) - a) / (b - a)
        return np.clip(ramp, lo, 1.0)


@dataclass(frozen=True)
class DiurnalShape:
    """Clear-sky shape over the UTC day as (hour, value) knots.

    "step" holds each knot's value until the next knot (the value before the
    first knot is the last knot's, wrapping midnight); "linear" interpolates.
    """

    knots: tuple[tuple[float, float], ...] = ((10.0, 1.0), (22.0, 0.0))
    interpolation: str = "step"

    def __post_init__(self):
        if not self.knots:
            raise InvariantViolation("diurnal shape needs at least one knot")
        hours = [h for h, _ in self.knots]
        if hours != sorted(hours) or any(not 0.0 <= h < 24.0 for h in hours):
            raise InvariantViolation("diurnal knots must be sorted hours in [0, 24)")
        if any(not 0.0 <= v <= 1.0 for _, v in self.knots):
            raise InvariantViolation("diurnal values must lie in [0, 1]")
        if self.interpolation not in ("step", "linear"):
            raise InvariantViolation(f"unknown diurnal interpolation '{self.interpolation}'")

    def at(self, t: datetime) -> float:
        hour = t.hour + t.minute / 60.0 + t.second / 3600.0
        hours = np.array([h for h, _ in self.knots])
        values = np.array([v for _, v in self.knots])
        if self.interpolation == "linear":
            return float(np.interp(hour, hours, values, period=24.0))
        idx = int(np.searchsorted(hours, hour, side="right")) - 1
        return float(values[idx])  # idx == -1 wraps to the last knot


def solar_fraction(
    track: StormTrack,
    t: datetime,
    site: tuple[float, float],
    params: SolarReductionParams,
    diurnal: DiurnalShape | None = None,
) -> float:
    """Fraction of nameplate solar output available at a site."""
    state = state_at(track, t)
    r = haversine_km(state.lat, state.lon, site[0], site[1])
    shape = (diurnal or DiurnalShape()).at(t)
    return float(params.cloud_factor(r / state.rmax)) * shape
