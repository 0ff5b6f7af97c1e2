"""Resolve a RunConfig into the loaded, validated inputs every command shares."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from app.dispatch.problem import DispatchCosts
from app.errors import MissingFile
from app.grid.base import GridModel
from app.grid.components import ComponentClass
from app.grid.loader import GridPaths, load_grid
from app.grid.scaling import scale_renewable_integration
from app.hazard.exposure import build_exposure
from app.hazard.profiles import WindProfileParams
from app.hazard.roughness import RoughnessMap, load_roughness
from app.hazard.track import StormTrack, interpolate_track, load_track, scale_intensity
from app.schemas.config import RunConfig, config_hash
from app.simulation.horizon import Horizon
from app.simulation.loop import Scenario, SimulationParams
from app.vulnerability.fragility import DEFAULT_CURVES, FragilityCurve, load_fragility
from app.vulnerability.solar import DiurnalShape, SolarReductionParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RunInputs:
    config: RunConfig
    config_hash: str
    grid: GridModel
    track: StormTrack
    horizon: Horizon
    roughness: RoughnessMap
    curves: dict[ComponentClass, FragilityCurve]
    wind: WindProfileParams
    solar: SolarReductionParams
    diurnal: DiurnalShape

    @property
    def params(self) -> SimulationParams:
        c = self.config
        return SimulationParams(
            step_minutes=self.horizon.step_minutes,
            rocof_limit=c.cascade.rocof_limit_hz_s,
            trip_probability=c.cascade.trip_probability,
            costs=DispatchCosts(c.dispatch.value_of_lost_load, c.dispatch.curtailment_cost),
            tower_spacing_km=c.vulnerability.tower_spacing_km,
            exact_dispatch=c.dispatch.exact,
            record_flows=c.cascade.record_flows,
        )


def check_paths(config: RunConfig) -> None:
    """Every referenced input must exist before anything is loaded."""
    inputs = config.inputs
    paths = GridPaths.from_dir(inputs.grid_dir)
    required = [paths.buses, paths.lines, paths.generators, paths.feeders, inputs.track]
    required += [p for p in (inputs.roughness, inputs.fragility, inputs.observed) if p is not None]
    for p in required:
        if not Path(p).exists():
            raise MissingFile(str(p))


def resolve_horizon(config: RunConfig, track: StormTrack) -> Horizon:
    h = config.horizon
    default = Horizon.event_day(track.start, h.step_minutes)
    if h.start is None and h.end is None:
        return default
    return Horizon(start=h.start or default.start, end=h.end or default.end, step_minutes=h.step_minutes)


def load_inputs(config: RunConfig) -> RunInputs:
    check_paths(config)
    c = config
    diurnal = DiurnalShape(
        knots=tuple((float(h), float(v)) for h, v in c.solar.diurnal_knots),
        interpolation=c.solar.diurnal_interpolation,
    )

    grid = load_grid(
        GridPaths.from_dir(c.inputs.grid_dir),
        system_base=c.grid.system_base_mva,
        frequency=c.grid.frequency_hz,
        customers_per_mw=c.grid.customers_per_mw,
    )
    track = load_track(c.inputs.track)
    if c.wind.interpolation_minutes is not None:
        track = interpolate_track(track, c.wind.interpolation_minutes)
    if c.wind.intensity_scale != 1.0:
        track = scale_intensity(track, c.wind.intensity_scale)
    horizon = resolve_horizon(c, track)

    if c.grid.integration_level is not None:
        grid = scale_renewable_integration(grid, c.grid.integration_level, horizon, diurnal)

    roughness = load_roughness(c.inputs.roughness) if c.inputs.roughness else RoughnessMap.uniform()
    curves = load_fragility(c.inputs.fragility) if c.inputs.fragility else dict(DEFAULT_CURVES)

    logger.info(
        f"Loaded grid: {len(grid.buses)} buses, {len(grid.lines)} lines, {len(grid.generators)} generators, "
        f"{len(grid.feeders)} feeders; horizon {horizon.n_steps} steps of {horizon.step_minutes:g} min"
    )
    return RunInputs(
        config=config,
        config_hash=config_hash(config),
        grid=grid,
        track=track,
        horizon=horizon,
        roughness=roughness,
        curves=curves,
        wind=WindProfileParams(
            profile_kind=c.wind.profile,
            rankine_alpha=c.wind.rankine_alpha,
            holland_b=c.wind.holland_b,
            background_flow_fraction=c.wind.background_flow_fraction,
            background_flow_rotation_deg=c.wind.background_flow_rotation_deg,
            gust_factor=c.wind.gust_factor,
        ),
        solar=SolarReductionParams(
            inner_radius_factor=c.solar.inner_radius_factor,
            outer_radius_factor=c.solar.outer_radius_factor,
            min_fraction=c.solar.min_fraction,
        ),
        diurnal=diurnal,
    )


def build_scenario(inputs: RunInputs, grid: Optional[GridModel] = None) -> Scenario:
    """Precompute the hazard exposure; `grid` overrides the configured grid (sweeps)."""
    grid = grid or inputs.grid
    params = inputs.params
    params.costs.check_ordering(grid)
    exposure = build_exposure(
        grid,
        inputs.track,
        inputs.horizon,
        inputs.wind,
        inputs.roughness,
        inputs.solar,
        inputs.diurnal,
        resample_km=inputs.config.wind.resample_km,
        tower_spacing_km=params.tower_spacing_km,
    )
    return Scenario(grid=grid, exposure=exposure, curves=inputs.curves, params=params)
