"""Spherical-earth geodesy on (lat, lon) degrees."""

import math

import numpy as np

EARTH_RADIUS_KM = 6371.0


def haversine_km(lat1, lon1, lat2, lon2):
    """Great-circle distance in km; broadcasts over numpy arrays."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dphi / 2.0) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def initial_bearing_deg(lat1, lon1, lat2, lon2):
    """Initial bearing from point 1 to point 2, degrees clockwise from north."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dlmb = np.radians(lon2) - np.radians(lon1)
    x = np.sin(dlmb) * np.cos(p2)
    y = np.cos(p1) * np.sin(p2) - np.sin(p1) * np.cos(p2) * np.cos(dlmb)
    return np.degrees(np.arctan2(x, y)) % 360.0


def destination(lat: float, lon: float, bearing_deg: float, distance_km: float) -> tuple[float, float]:
    delta = distance_km / EARTH_RADIUS_KM
    theta = math.radians(bearing_deg)
    p1, l1 = math.radians(lat), math.radians(lon)
    p2 = math.asin(math.sin(p1) * math.cos(delta) + math.cos(p1) * math.sin(delta) * math.cos(theta))
    l2 = l1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(p1),
        math.cos(delta) - math.sin(p1) * math.sin(p2),
    )
    return math.degrees(p2), (math.degrees(l2) + 540.0) % 360.0 - 180.0


def _unit_vector(lat: float, lon: float) -> np.ndarray:
    p, lm = math.radians(lat), math.radians(lon)
    return np.array([math.cos(p) * math.cos(lm), math.cos(p) * math.sin(lm), math.sin(p)])


def great_circle_point(a: tuple[float, float], b: tuple[float, float], fraction: float) -> tuple[float, float]:
    """Point at `fraction` of the way from a to b along the great circle."""
    if fraction <= 0.0:
        return a
    if fraction >= 1.0:
        return b
    va, vb = _unit_vector(*a), _unit_vector(*b)
    omega = math.acos(min(1.0, max(-1.0, float(va @ vb))))
    if omega < 1e-12:
        return a
    s = math.sin(omega)
    v = (math.sin((1.0 - fraction) * omega) / s) * va + (math.sin(fraction * omega) / s) * vb
    return math.degrees(math.asin(max(-1.0, min(1.0, v[2])))), math.degrees(math.atan2(v[1], v[0]))


def polyline_length_km(points) -> float:
    if len(points) < 2:
        return 0.0
    arr = np.asarray(points, dtype=float)
    return float(np.sum(haversine_km(arr[:-1, 0], arr[:-1, 1], arr[1:, 0], arr[1:, 1])))


def densify(points, spacing_km: float) -> tuple[tuple[float, float], ...]:
    """Insert great-circle points so consecutive samples are at most spacing_km apart."""
    pts = [tuple(map(float, p)) for p in points]
    if len(pts) < 2 or spacing_km <= 0:
        return tuple(pts)
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil(float(haversine_km(a[0], a[1], b[0], b[1])) / spacing_km))
        out.extend(great_circle_point(a, b, k / n) for k in range(1, n))
        out.append(b)
    return tuple(out)


def centroid(points) -> tuple[float, float]:
    arr = np.asarray(points, dtype=float)
    return float(arr[:, 0].mean()), float(arr[:, 1].mean())
