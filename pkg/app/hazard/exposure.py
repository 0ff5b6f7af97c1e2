"""
Realization-independent hazard over the simulation horizon.

Winds and solar fractions depend only on the track and the static grid, so
they are evaluated once per ensemble and shared by every realization.
"""

import logging
from dataclasses import dataclass, replace
from datetime import datetime
from functools import cached_property

import numpy as np

from app.grid.base import GeneratorKind, GridModel
from app.grid.components import DEFAULT_TOWER_SPACING_KM, fragile_components
from app.hazard.geo import centroid, densify, haversine_km
from app.hazard.profiles import WindProfileParams
from app.hazard.roughness import RoughnessMap
from app.hazard.track import StormTrack, state_at, translation_velocity
from app.hazard.wind import DEFAULT_RESAMPLE_KM, open_water_speed
from app.simulation.horizon import Horizon
from app.vulnerability.solar import DiurnalShape, SolarReductionParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HazardExposure:
    times: tuple[datetime, ...]
    component_ids: tuple[str, ...]
    component_wind: np.ndarray  # (steps, components) m/s
    turbine_ids: tuple[str, ...]
    turbine_wind: np.ndarray  # (steps, wind generators) m/s at hub site
    solar_ids: tuple[str, ...]
    solar_fraction: np.ndarray  # (steps, solar units) incl. clear-sky shape
    clear_sky: np.ndarray  # (steps,)
    storm_active: np.ndarray  # (steps,) bool

    @property
    def n_steps(self) -> int:
        return len(self.times)

    @cached_property
    def component_col(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.component_ids)}

    @cached_property
    def turbine_col(self) -> dict[str, int]:
        return {gid: i for i, gid in enumerate(self.turbine_ids)}

    @cached_property
    def solar_col(self) -> dict[str, int]:
        return {gid: i for i, gid in enumerate(self.solar_ids)}

    def scaled(self, k: float) -> "HazardExposure":
        """Same exposure with every wind multiplied by k."""
        return replace(self, component_wind=self.component_wind * k, turbine_wind=self.turbine_wind * k)


def build_exposure(
    grid: GridModel,
    track: StormTrack,
    horizon: Horizon,
    wind_params: WindProfileParams,
    roughness: RoughnessMap,
    solar_params: SolarReductionParams,
    diurnal: DiurnalShape,
    resample_km: float = DEFAULT_RESAMPLE_KM,
    tower_spacing_km: float = DEFAULT_TOWER_SPACING_KM,
) -> HazardExposure:
    components = fragile_components(grid, tower_spacing_km)

    # every component's resampled route, flattened with segment offsets
    samples = [np.asarray(densify(c.geometry, resample_km), dtype=float) for c in components]
    offsets = np.cumsum([0] + [len(s) for s in samples[:-1]]).astype(int)
    pts = np.vstack(samples) if samples else np.empty((0, 2))

    turbines = [g for g in grid.generators if g.kind == GeneratorKind.WIND]
    turbine_pts = np.array([grid.bus_by_id[g.bus].point for g in turbines], dtype=float).reshape(-1, 2)

    solar_sites = [(g.id, grid.bus_by_id[g.bus].point) for g in grid.generators if g.kind == GeneratorKind.UTILITY_SOLAR]
    solar_sites += [(f.btm_unit_id, centroid(f.route_points)) for f in grid.feeders]
    solar_pts = np.array([p for _, p in solar_sites], dtype=float).reshape(-1, 2)

    factor = roughness.factor(pts[:, 0], pts[:, 1]) * wind_params.gust_factor if len(pts) else np.empty(0)
    turbine_factor = (
        roughness.factor(turbine_pts[:, 0], turbine_pts[:, 1]) * wind_params.gust_factor if len(turbines) else np.empty(0)
    )

    n = horizon.n_steps
    comp_wind = np.zeros((n, len(components)))
    turb_wind = np.zeros((n, len(turbines)))
    solar = np.zeros((n, len(solar_sites)))
    clear = np.array([diurnal.at(t) for t in horizon.times])
    active = np.zeros(n, dtype=bool)

    for k, t in enumerate(horizon.times):
        if not track.covers(t):
            solar[k, :] = clear[k]
            continue
        active[k] = True
        state = state_at(track, t)
        translation = translation_velocity(track, t)
        if len(pts):
            speed = open_water_speed(state, translation, pts[:, 0], pts[:, 1], wind_params) * factor
            comp_wind[k] = np.maximum(np.maximum.reduceat(speed, offsets), 0.0)
        if len(turbines):
            speed = open_water_speed(state, translation, turbine_pts[:, 0], turbine_pts[:, 1], wind_params)
            turb_wind[k] = np.maximum(speed * turbine_factor, 0.0)
        if len(solar_sites):
            r = haversine_km(state.lat, state.lon, solar_pts[:, 0], solar_pts[:, 1])
            solar[k] = solar_params.cloud_factor(r / state.rmax) * clear[k]

    logger.info(
        f"Hazard exposure: {len(components)} components, {len(turbines)} turbines, "
        f"{len(solar_sites)} solar units over {n} steps ({int(active.sum())} with the storm in range)"
    )
    return HazardExposure(
        times=horizon.times,
        component_ids=tuple(c.id for c in components),
        component_wind=comp_wind,
        turbine_ids=tuple(g.id for g in turbines),
        turbine_wind=turb_wind,
        solar_ids=tuple(sid for sid, _ in solar_sites),
        solar_fraction=solar,
        clear_sky=clear,
        storm_active=active,
    )
