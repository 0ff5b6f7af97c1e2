"""Generation capacity left available under the storm at one step."""

from dataclasses import dataclass

from app.grid.base import BTM_PREFIX, GeneratorKind, GridModel
from app.hazard.exposure import HazardExposure
from app.vulnerability.damage import DamageState

WIND_CUT_OUT_SPEED = 25.0  # m/s


def available_generation(
    grid: GridModel,
    state: DamageState,
    exposure: HazardExposure,
    step: int,
    dead_buses: frozenset[str] = frozenset(),
) -> dict[str, float]:
    """MW available per generator id, BTM units included. Never negative."""
    failed = state.failed_ids()
    out: dict[str, float] = {}
    for g in grid.all_generators:
        if not g.available or g.bus in dead_buses:
            out[g.id] = 0.0
            continue
        if g.kind in (GeneratorKind.THERMAL, GeneratorKind.HYDRO):
            out[g.id] = g.p_max
        elif g.kind == GeneratorKind.WIND:
            local = exposure.turbine_wind[step, exposure.turbine_col[g.id]]
            out[g.id] = 0.0 if local > WIND_CUT_OUT_SPEED else g.p_max
        else:
            # BTM units go down with their feeder as well as with their panels
            feeder_down = g.id.startswith(BTM_PREFIX) and g.id[len(BTM_PREFIX):] in failed
            if g.id in failed or feeder_down:
                out[g.id] = 0.0
            else:
                fraction = exposure.solar_fraction[step, exposure.solar_col[g.id]]
                out[g.id] = max(g.p_max * float(fraction), 0.0)
    return out


@dataclass(frozen=True)
class SolarTally:
    actual_mw: float
    clear_sky_mw: float

    @property
    def ratio(self) -> float:
        return self.actual_mw / self.clear_sky_mw if self.clear_sky_mw > 0 else 1.0


def distributed_solar_tally(grid: GridModel, available: dict[str, float], exposure: HazardExposure, step: int) -> SolarTally:
    """Island-wide BTM output against its undisturbed clear-sky output."""
    clear = sum(f.btm_solar_capacity for f in grid.feeders) * float(exposure.clear_sky[step])
    actual = sum(available.get(f.btm_unit_id, 0.0) for f in grid.feeders)
    return SolarTally(actual_mw=actual, clear_sky_mw=clear)
