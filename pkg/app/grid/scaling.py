"""Renewable-integration scaling of behind-the-meter solar."""

import logging
from dataclasses import replace
from datetime import datetime, timezone
from typing import Optional

from app.errors import InfeasibleTarget
from app.grid.base import GridModel
from app.simulation.horizon import Horizon
from app.vulnerability.solar import DiurnalShape

logger = logging.getLogger(__name__)

MIN_INTEGRATION_LEVEL = 0.05
MAX_INTEGRATION_LEVEL = 0.95


def _default_horizon() -> Horizon:
    return Horizon.event_day(datetime(2000, 1, 1, tzinfo=timezone.utc))


def _solar_hours(horizon: Horizon, diurnal: DiurnalShape) -> float:
    """Clear-sky energy (MWh) produced per MW of BTM capacity over the horizon."""
    return sum(diurnal.at(t) for t in horizon.times) * horizon.step_hours


def feeder_demand_energy(grid: GridModel, horizon: Horizon) -> dict[str, float]:
    return {
        f.id: sum(f.demand(k) for k in range(horizon.n_steps)) * horizon.step_hours
        for f in grid.feeders
    }


def integration_level(
    grid: GridModel,
    horizon: Optional[Horizon] = None,
    diurnal: Optional[DiurnalShape] = None,
) -> float:
    """Share of demand energy met by clear-sky BTM solar over the horizon."""
    horizon = horizon or _default_horizon()
    diurnal = diurnal or DiurnalShape()
    demand = sum(feeder_demand_energy(grid, horizon).values())
    if demand <= 0:
        return 0.0
    capacity = sum(f.btm_solar_capacity for f in grid.feeders)
    return capacity * _solar_hours(horizon, diurnal) / demand


def scale_renewable_integration(
    grid: GridModel,
    target_level: float,
    horizon: Optional[Horizon] = None,
    diurnal: Optional[DiurnalShape] = None,
) -> GridModel:
    """Return a copy with BTM capacity set to the target integration level.

    Per-feeder capacity is proportional to the feeder's demand energy. A grid
    already at the target level is returned unchanged.
    """
    if not MIN_INTEGRATION_LEVEL <= target_level <= MAX_INTEGRATION_LEVEL:
        raise InfeasibleTarget(
            f"integration level {target_level} outside [{MIN_INTEGRATION_LEVEL}, {MAX_INTEGRATION_LEVEL}]"
        )
    horizon = horizon or _default_horizon()
    diurnal = diurnal or DiurnalShape()

    current = integration_level(grid, horizon, diurnal)
    if abs(current - target_level) <= 1e-12 * target_level:
        return grid

    solar_hours = _solar_hours(horizon, diurnal)
    if solar_hours <= 0:
        raise InfeasibleTarget("the horizon contains no daylight; solar cannot meet any demand")
    energy = feeder_demand_energy(grid, horizon)
    if sum(energy.values()) <= 0:
        raise InfeasibleTarget("grid has no demand energy to scale against")

    feeders = tuple(
        replace(f, btm_solar_capacity=target_level * energy[f.id] / solar_hours) for f in grid.feeders
    )
    logger.info(
        f"Scaled BTM solar from level {current:.3f} to {target_level:.3f}: "
        f"{sum(f.btm_solar_capacity for f in feeders):.1f} MW installed"
    )
    return grid.with_feeders(feeders)
