from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config import SCHEMA_VERSION


class EventRecord(BaseModel):
    # RoCoF magnitudes are infinite for inertia-free islands
    model_config = ConfigDict(ser_json_inf_nan="constants")

    step: int
    kind: str
    component: str
    magnitude: float


class RealizationRecord(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    index: int
    seed: int
    performance: list[float]
    served_mw: list[float]
    shed_mw: list[float]
    events: list[EventRecord]
    blackout_step: Optional[int] = None
    largest_failure_step: int
    largest_failure_drop: float
    line_failure_steps: dict[str, int] = Field(default_factory=dict)
    region_performance: dict[str, list[float]] = Field(default_factory=dict)
    solar_actual_mw: list[float] = Field(default_factory=list)
    solar_clear_sky_mw: list[float] = Field(default_factory=list)


class ManifestEntry(BaseModel):
    index: int
    seed: int
    file: Optional[str] = None  # None when the realization failed
    error: Optional[str] = None


class Manifest(BaseModel):
    schema_version: int = SCHEMA_VERSION
    config_hash: str
    n: int
    master_seed: int
    integration_level: Optional[float] = None
    preset: Optional[dict] = None
    times: list[str]
    line_ids: list[str]
    regions: list[str] = Field(default_factory=list)
    realizations: list[ManifestEntry]


class EnsembleSummary(BaseModel):
    schema_version: int = SCHEMA_VERSION
    config_hash: str
    n: int
    failed_count: int = 0
    failed_indices: list[int] = Field(default_factory=list)
    times: list[str]
    blackout_probability: float
    blackout_histogram: list[int]
    median_blackout_step: Optional[float] = None
    resilient_count: int
    vulnerable_count: int
    critical_index: dict[str, float]
    quantiles: dict[str, list[float]]  # "p05", "p25", "p50", "p75", "p95"
    mean_final_performance: float
    stderr_final_performance: float
    region_median_performance: dict[str, list[float]] = Field(default_factory=dict)
    mean_solar_ratio: list[float] = Field(default_factory=list)


class ComparisonStep(BaseModel):
    step: int
    time_utc: str
    observed: float  # fraction with power
    p05: float
    p25: float
    p50: float
    p75: float
    p95: float
    deviation: float  # observed - p50


class ComparisonReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    config_hash: str
    region: str
    steps: list[ComparisonStep]
    coverage_50: float  # share of observed steps inside the 25-75% band
    coverage_90: float  # share inside the 5-95% band
    max_abs_deviation: float
    observed_blackout_step: Optional[int] = None
    observed_blackout_quantile: Optional[float] = None  # share of simulated blackouts at or before it
    observed_blackout_in_support: Optional[bool] = None


class SweepRow(BaseModel):
    level: float
    blackout_probability: float
    median_blackout_step: Optional[float] = None
    n: int
    failed_count: int = 0


class PresetRow(BaseModel):
    component: str
    rank: Optional[float] = None  # None for the baseline
    blackout_probability: float
    delta: float
    n: int


class Provenance(BaseModel):
    schema_version: int = SCHEMA_VERSION
    config_hash: str
    command: str
    seed: Optional[int] = None
    options: dict = Field(default_factory=dict)
    package_version: str
