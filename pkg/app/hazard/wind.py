"""
Asymmetric surface wind field: axisymmetric rotation plus a rotated fraction
of the storm's translation, corrected to the local surface roughness.
Northern hemisphere only (counterclockwise rotation).
"""

import math
from datetime import datetime

import numpy as np

from app.hazard.geo import densify, haversine_km, initial_bearing_deg
from app.hazard.profiles import WindProfileParams, radial_wind
from app.hazard.roughness import RoughnessMap
from app.hazard.track import StormTrack, TrackPoint, state_at, translation_velocity

DEFAULT_RESAMPLE_KM = 1.0


def background_flow(translation: tuple[float, float], params: WindProfileParams) -> tuple[float, float]:
    """beta * translation, rotated counterclockwise by theta."""
    ue, vn = translation
    th = math.radians(params.background_flow_rotation_deg)
    beta = params.background_flow_fraction
    return (
        beta * (ue * math.cos(th) - vn * math.sin(th)),
        beta * (ue * math.sin(th) + vn * math.cos(th)),
    )


def open_water_speed(
    state: TrackPoint,
    translation: tuple[float, float],
    lats: np.ndarray,
    lons: np.ndarray,
    params: WindProfileParams,
) -> np.ndarray:
    """Open-water wind speed (m/s) at each site for one storm state."""
    r = haversine_km(state.lat, state.lon, lats, lons)
    phi = np.radians(initial_bearing_deg(state.lat, state.lon, lats, lons))
    vt = radial_wind(r, state.vmax, state.rmax, params)
    bg_e, bg_n = background_flow(translation, params)
    # tangential unit vector 90 deg counterclockwise from the outward radial (sin phi, cos phi)
    east = -np.cos(phi) * vt + bg_e
    north = np.sin(phi) * vt + bg_n
    return np.hypot(east, north)


def surface_speed(
    track: StormTrack,
    t: datetime,
    lats: np.ndarray,
    lons: np.ndarray,
    params: WindProfileParams,
    roughness: RoughnessMap,
) -> np.ndarray:
    """Gust-level surface wind (m/s) at each site, non-negative."""
    state = state_at(track, t)
    speed = open_water_speed(state, translation_velocity(track, t), lats, lons, params)
    return np.maximum(speed * roughness.factor(lats, lons) * params.gust_factor, 0.0)


def wind_at(
    track: StormTrack,
    t: datetime,
    site: tuple[float, float],
    params: WindProfileParams,
    roughness: RoughnessMap,
) -> float:
    return float(surface_speed(track, t, np.array([site[0]]), np.array([site[1]]), params, roughness)[0])


def component_wind(
    track: StormTrack,
    t: datetime,
    geometry,
    params: WindProfileParams,
    roughness: RoughnessMap,
    resample_km: float = DEFAULT_RESAMPLE_KM,
) -> float:
    """Maximum wind over the geometry, sampled at least every resample_km."""
    pts = np.asarray(densify(geometry, resample_km), dtype=float)
    return float(surface_speed(track, t, pts[:, 0], pts[:, 1], params, roughness).max())
