"""
Run configuration document.

One JSON file per run. Every physical default lives here as a described
field, so this module doubles as the defaults table (`gridstorm defaults`).
Relative paths resolve against the directory of the config file.
"""

import hashlib
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.config import SCHEMA_VERSION
from app.errors import ConfigError, MissingFile, SchemaVersionError
from app.hazard.profiles import ProfileKind


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InputsConfig(_Section):
    grid_dir: str = Field(description="Directory with buses.csv, lines.csv, generators.csv, feeders.csv and optional shapes.csv")
    track: str = Field(description="Storm track CSV: time_iso8601,lat,lon,vmax_ms,rmax_km")
    roughness: Optional[str] = Field(None, description="ESRI ASCII roughness-length raster (m); open water everywhere when absent")
    fragility: Optional[str] = Field(None, description="Fragility table CSV: class,median_ms,beta; built-in curves when absent")
    observed: Optional[str] = Field(None, description="Observed outage CSV: time_iso8601,region,pct_with_power")


class GridConfig(_Section):
    system_base_mva: float = Field(100.0, gt=0, description="Per-unit base for line reactances (MVA)")
    frequency_hz: float = Field(60.0, gt=0, description="Rated system frequency f0 (Hz)")
    customers_per_mw: Optional[float] = Field(
        None, gt=0, description="Customers per MW of peak demand used when feeders.csv leaves customers blank"
    )
    integration_level: Optional[float] = Field(
        None, ge=0.05, le=0.95, description="Rescale BTM solar to this share of demand energy before simulating"
    )


class HorizonConfig(_Section):
    start: Optional[datetime] = Field(None, description="First step (UTC); default 00:00 UTC of the track's first day")
    end: Optional[datetime] = Field(None, description="Last step (UTC), inclusive; default 23:00 UTC of that day")
    step_minutes: float = Field(10.0, gt=0, description="Step length (minutes)")

    @field_validator("start", "end")
    @classmethod
    def _utc(cls, v: Optional[datetime]) -> Optional[datetime]:
        if v is None:
            return v
        return v.replace(tzinfo=timezone.utc) if v.tzinfo is None else v.astimezone(timezone.utc)


class WindConfig(_Section):
    profile: ProfileKind = Field(ProfileKind.MODIFIED_RANKINE, description="Radial wind profile")
    rankine_alpha: float = Field(0.5, gt=0, description="Decay exponent outside rmax for the modified Rankine profile")
    holland_b: float = Field(1.5, ge=1.0, le=2.5, description="Holland shape parameter B")
    background_flow_fraction: float = Field(0.55, ge=0, le=1, description="Fraction of storm translation added to the wind")
    background_flow_rotation_deg: float = Field(20.0, description="Counterclockwise rotation of the background flow (deg)")
    gust_factor: float = Field(1.0, gt=0, description="Multiplier turning sustained wind into the wind compared with resistance")
    intensity_scale: float = Field(1.0, gt=0, description="Multiplier applied to every track vmax")
    resample_km: float = Field(1.0, gt=0, description="Spacing of wind samples along line and feeder routes (km)")
    interpolation_minutes: Optional[float] = Field(
        None, gt=0, description="Densify the track to this interval before use; fixes are kept verbatim"
    )


class SolarConfig(_Section):
    inner_radius_factor: float = Field(2.0, ge=0, description="Sites within this many rmax get the minimum fraction")
    outer_radius_factor: float = Field(10.0, gt=0, description="Sites beyond this many rmax are unshaded")
    min_fraction: float = Field(0.2, ge=0, le=1, description="Irradiance fraction under the cloud shield core")
    diurnal_knots: list[tuple[float, float]] = Field(
        default_factory=lambda: [(10.0, 1.0), (22.0, 0.0)],
        description="Clear-sky shape as (UTC hour, fraction) knots",
    )
    diurnal_interpolation: Literal["step", "linear"] = Field("step", description="Knot interpolation")


class VulnerabilityConfig(_Section):
    tower_spacing_km: float = Field(1.0, gt=0, description="Route length per transmission tower (km)")


class CascadeConfig(_Section):
    rocof_limit_hz_s: float = Field(2.0, gt=0, description="Sub-grids with |RoCoF| above this are removed (Hz/s)")
    trip_probability: float = Field(
        0.0, ge=0, le=1, description="Per-pass trip probability for lines loaded between normal and emergency rating"
    )
    record_flows: bool = Field(False, description="Write flows.csv with every solved line flow")


class DispatchConfig(_Section):
    value_of_lost_load: float = Field(10_000.0, gt=0, description="Shedding penalty ($/MWh)")
    curtailment_cost: float = Field(100.0, gt=0, description="Penalty on unused renewable output ($/MWh)")
    exact: Optional[bool] = Field(
        None, description="Force exact (true) or merit-order (false) commitment; default decides by unit count"
    )


class EnsembleConfig(_Section):
    n: int = Field(100, ge=1, description="Realizations per ensemble")
    master_seed: int = Field(0, ge=0, description="Seed from which every realization seed is derived")
    workers: Optional[int] = Field(None, ge=1, description="Parallel workers; default from GRIDSTORM_WORKERS")
    sweep_levels: list[float] = Field(
        default_factory=lambda: [round(0.1 * k, 1) for k in range(1, 9)],
        description="Integration levels for the sensitivity sweep",
    )
    preset_component: Optional[str] = Field(
        None, description="Component for the preset-resistance experiment; default is the highest critical index"
    )
    preset_ranks: list[float] = Field(
        default_factory=lambda: [0.01, 0.10, 0.99], description="Resistance ranks pinned in the preset experiment"
    )

    @field_validator("preset_ranks")
    @classmethod
    def _ranks(cls, v: list[float]) -> list[float]:
        if any(not 0.0 < r < 1.0 for r in v):
            raise ValueError("preset ranks must lie strictly between 0 and 1")
        return v


class RunConfig(_Section):
    schema_version: int = Field(SCHEMA_VERSION, description="Config schema version understood by this build")
    inputs: InputsConfig
    grid: GridConfig = Field(default_factory=GridConfig)
    horizon: HorizonConfig = Field(default_factory=HorizonConfig)
    wind: WindConfig = Field(default_factory=WindConfig)
    solar: SolarConfig = Field(default_factory=SolarConfig)
    vulnerability: VulnerabilityConfig = Field(default_factory=VulnerabilityConfig)
    cascade: CascadeConfig = Field(default_factory=CascadeConfig)
    dispatch: DispatchConfig = Field(default_factory=DispatchConfig)
    ensemble: EnsembleConfig = Field(default_factory=EnsembleConfig)
    output_dir: str = Field("out", description="Where commands write their outputs")

    @model_validator(mode="after")
    def _costs(self) -> "RunConfig":
        if not self.dispatch.value_of_lost_load > self.dispatch.curtailment_cost:
            raise ValueError("value_of_lost_load must exceed curtailment_cost")
        return self

    def resolve(self, base: str | os.PathLike) -> "RunConfig":
        """Copy with every relative path anchored at `base`."""
        b = Path(base)

        def anchor(p: Optional[str]) -> Optional[str]:
            if p is None:
                return None
            return str(p) if Path(p).is_absolute() else str(b / p)

        inputs = self.inputs.model_copy(
            update={k: anchor(getattr(self.inputs, k)) for k in ("grid_dir", "track", "roughness", "fragility", "observed")}
        )
        return self.model_copy(update={"inputs": inputs, "output_dir": anchor(self.output_dir)})


def config_hash(config: RunConfig) -> str:
    """SHA-256 of the canonical JSON dump (sorted keys, no whitespace)."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_run_config(path: str | os.PathLike) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise MissingFile(str(path))
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p.name}: not valid JSON ({e.msg} at line {e.lineno})")
    if not isinstance(raw, dict):
        raise ConfigError(f"{p.name}: top level must be an object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"{p.name}: schema_version {version!r} is not supported (expected {SCHEMA_VERSION})")
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        errors = [{"loc": ".".join(str(x) for x in err["loc"]), "msg": err["msg"]} for err in e.errors()]
        raise ConfigError(f"{p.name}: invalid run config", detail={"errors": errors})
    return config.resolve(p.parent)


def write_run_config(config: RunConfig, path: str | os.PathLike) -> None:
    Path(path).write_text(config.model_dump_json(indent=2, exclude_none=True) + "\n", encoding="utf-8")


def defaults_table() -> list[dict]:
    """(section, key, default, description) rows for every documented field."""
    rows = []
    for section, field in RunConfig.model_fields.items():
        annotation = field.annotation
        if isinstance(annotation, type) and issubclass(annotation, BaseModel):
            for key, sub in annotation.model_fields.items():
                default = None if sub.is_required() else sub.get_default(call_default_factory=True)
                rows.append(
                    {"key": f"{section}.{key}", "default": default, "required": sub.is_required(), "description": sub.description or ""}
                )
        else:
            default = None if field.is_required() else field.get_default(call_default_factory=True)
            rows.append({"key": section, "default": default, "required": field.is_required(), "description": field.description or ""})
    return rows
