"""
Storm best-track handling: ingestion, time interpolation along great circles,
and translation velocity.
"""

import bisect
import logging
import math
import os
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from functools import cached_property
from pathlib import Path

import pandas as pd
from dateutil.parser import isoparse

from app.errors import DegenerateTrack, InvariantViolation, MissingFile, OutOfRange, ParseError
from app.hazard.geo import great_circle_point, haversine_km, initial_bearing_deg

logger = logging.getLogger(__name__)

TRACK_COLUMNS = ["time_iso8601", "lat", "lon", "vmax_ms", "rmax_km"]


@dataclass(frozen=True)
class TrackPoint:
    time: datetime
    lat: float
    lon: float
    vmax: float  # m/s
    rmax: float  # km


@dataclass(frozen=True)
class StormTrack:
    points: tuple[TrackPoint, ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise DegenerateTrack(f"track needs at least 2 points, got {len(self.points)}")
        for a, b in zip(self.points[:-1], self.points[1:]):
            if not b.time > a.time:
                raise InvariantViolation(f"track times must be strictly increasing ({a.time} -> {b.time})")
        for p in self.points:
            if p.vmax < 0 or p.rmax <= 0:
                raise InvariantViolation(f"track point at {p.time} needs vmax >= 0 and rmax > 0")

    @cached_property
    def times(self) -> tuple[datetime, ...]:
        return tuple(p.time for p in self.points)

    @property
    def start(self) -> datetime:
        return self.points[0].time

    @property
    def end(self) -> datetime:
        return self.points[-1].time

    def covers(self, t: datetime) -> bool:
        return self.start <= t <= self.end


def _utc(t: datetime) -> datetime:
    return t.replace(tzinfo=timezone.utc) if t.tzinfo is None else t.astimezone(timezone.utc)


def load_track(path: str | os.PathLike) -> StormTrack:
    if not Path(path).exists():
        raise MissingFile(str(path))
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in TRACK_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError(f"missing columns {missing}", row=0, column=missing[0], source=Path(path).name)
    points = []
    for i, rec in enumerate(df.to_dict(orient="records"), start=1):
        try:
            t = _utc(isoparse(rec["time_iso8601"].strip()))
        except ValueError:
            raise ParseError(f"bad timestamp '{rec['time_iso8601']}'", row=i, column="time_iso8601", source=Path(path).name)
        values = {}
        for col in ("lat", "lon", "vmax_ms", "rmax_km"):
            try:
                values[col] = float(rec[col])
            except ValueError:
                raise ParseError(f"expected a number, got '{rec[col]}'", row=i, column=col, source=Path(path).name)
        points.append(TrackPoint(t, values["lat"], values["lon"], values["vmax_ms"], values["rmax_km"]))
    track = StormTrack(tuple(points))
    logger.info(f"Loaded track: {len(track.points)} fixes from {track.start.isoformat()} to {track.end.isoformat()}")
    return track


def write_track(track: StormTrack, path: str | os.PathLike) -> None:
    pd.DataFrame(
        [
            [p.time.strftime("%Y-%m-%dT%H:%M:%SZ"), repr(p.lat), repr(p.lon), repr(p.vmax), repr(p.rmax)]
            for p in track.points
        ],
        columns=TRACK_COLUMNS,
    ).to_csv(path, index=False)


def state_at(track: StormTrack, t: datetime) -> TrackPoint:
    """Storm state at time t; original fixes are returned unchanged."""
    if not track.covers(t):
        raise OutOfRange(f"{t.isoformat()} outside track span {track.start.isoformat()}..{track.end.isoformat()}")
    i = bisect.bisect_left(track.times, t)
    if i < len(track.points) and track.times[i] == t:
        return track.points[i]
    a, b = track.points[i - 1], track.points[i]
    f = (t - a.time) / (b.time - a.time)
    lat, lon = great_circle_point((a.lat, a.lon), (b.lat, b.lon), f)
    return TrackPoint(
        time=t,
        lat=lat,
        lon=lon,
        vmax=a.vmax + f * (b.vmax - a.vmax),
        rmax=a.rmax + f * (b.rmax - a.rmax),
    )


def interpolate_track(track: StormTrack, dt_minutes: float) -> StormTrack:
    """Resample every dt minutes from the first fix, keeping every original fix verbatim."""
    if dt_minutes <= 0:
        raise InvariantViolation("interpolation interval must be positive")
    step = timedelta(minutes=dt_minutes)
    times = set(track.times)
    t = track.start
    while t <= track.end:
        times.add(t)
        t = t + step
    return StormTrack(tuple(state_at(track, t) for t in sorted(times)))


def translation_velocity(track: StormTrack, t: datetime) -> tuple[float, float]:
    """Storm motion (east, north) in m/s by finite differences of the center position.

    At a sample time the difference is centered over the adjacent samples
    (forward at the first sample, backward at the last); between samples the
    bracketing pair is used.
    """
    if not track.covers(t):
        raise OutOfRange(f"{t.isoformat()} outside track span")
    n = len(track.points)
    i = bisect.bisect_left(track.times, t)
    if i < n and track.times[i] == t:
        a, b = track.points[max(i - 1, 0)], track.points[min(i + 1, n - 1)]
    else:
        a, b = track.points[i - 1], track.points[i]
    seconds = (b.time - a.time).total_seconds()
    distance_m = float(haversine_km(a.lat, a.lon, b.lat, b.lon)) * 1000.0
    if distance_m == 0.0:
        return 0.0, 0.0
    speed = distance_m / seconds
    bearing = float(initial_bearing_deg(a.lat, a.lon, b.lat, b.lon))
    rad = math.radians(bearing)
    return speed * math.sin(rad), speed * math.cos(rad)


def scale_intensity(track: StormTrack, factor: float) -> StormTrack:
    """Track with every vmax multiplied by factor."""
    return StormTrack(tuple(replace(p, vmax=p.vmax * factor) for p in track.points))
