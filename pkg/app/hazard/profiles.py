"""
Axisymmetric radial wind profiles.
Each profile maps distance from the storm center to the rotational wind speed.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from app.errors import ConfigError

logger = logging.getLogger(__name__)


class ProfileKind(str, Enum):
    MODIFIED_RANKINE = "modified_rankine"
    HOLLAND = "holland"


@dataclass(frozen=True)
class WindProfileParams:
    profile_kind: ProfileKind = ProfileKind.MODIFIED_RANKINE
    rankine_alpha: float = 0.5
    holland_b: float = 1.5
    background_flow_fraction: float = 0.55
    background_flow_rotation_deg: float = 20.0
    gust_factor: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.background_flow_fraction <= 1.0:
            raise ConfigError("background_flow_fraction must lie in [0, 1]")
        if self.rankine_alpha <= 0:
            raise ConfigError("rankine_alpha must be positive")
        if not 1.0 <= self.holland_b <= 2.5:
            raise ConfigError("holland_b must lie in [1, 2.5]")
        if self.gust_factor <= 0:
            raise ConfigError("gust_factor must be positive")


class RadialProfile(ABC):
    kind: ProfileKind
    description: str

    @abstractmethod
    def speed(self, r_km: np.ndarray, vmax: float, rmax: float, params: WindProfileParams) -> np.ndarray:
        """Rotational wind speed (m/s) at distances r_km from the center."""
        ...


class ModifiedRankineProfile(RadialProfile):
    kind = ProfileKind.MODIFIED_RANKINE
    description = "Solid-body core inside rmax, vmax * (rmax / r) ** alpha outside"

    def speed(self, r_km, vmax, rmax, params):
        r = np.asarray(r_km, dtype=float)
        inner = vmax * r / rmax
        with np.errstate(divide="ignore"):
            outer = vmax * np.power(rmax / np.maximum(r, rmax), params.rankine_alpha)
        return np.where(r <= rmax, inner, outer)


class HollandProfile(RadialProfile):
    kind = ProfileKind.HOLLAND
    description = "Gradient-balance shape vmax * sqrt(x * exp(1 - x)), x = (rmax / r) ** B"

    def speed(self, r_km, vmax, rmax, params):
        r = np.asarray(r_km, dtype=float)
        safe_r = np.where(r > 0, r, rmax)
        x = np.power(rmax / safe_r, params.holland_b)
        with np.errstate(over="ignore", invalid="ignore"):
            v = vmax * np.sqrt(x * np.exp(1.0 - x))
        return np.where(r > 0, np.nan_to_num(v, nan=0.0), 0.0)


class ProfileRegistry:
    def __init__(self):
        self._profiles: dict[str, RadialProfile] = {
            ProfileKind.MODIFIED_RANKINE: ModifiedRankineProfile(),
            ProfileKind.HOLLAND: HollandProfile(),
        }

    def get(self, kind: str) -> Optional[RadialProfile]:
        return self._profiles.get(kind)

    def all(self) -> dict[str, RadialProfile]:
        return self._profiles

    def list_profiles(self) -> list[dict]:
        return [{"kind": str(kind.value), "description": p.description} for kind, p in self._profiles.items()]


profile_registry = ProfileRegistry()


def radial_wind(r_km, vmax: float, rmax: float, params: WindProfileParams) -> np.ndarray:
    profile = profile_registry.get(params.profile_kind)
    if profile is None:
        raise ConfigError(f"unknown wind profile '{params.profile_kind}'")
    return profile.speed(r_km, vmax, rmax, params)
