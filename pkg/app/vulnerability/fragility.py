"""Lognormal fragility curves per component class."""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.special import ndtr, ndtri

from app.errors import InvariantViolation, MissingFile, ParseError
from app.grid.components import ComponentClass

logger = logging.getLogger(__name__)

FRAGILITY_COLUMNS = ["class", "median_ms", "beta"]

# clamp for inverse-normal sampling; keeps resistances finite and positive
U_MIN = 1e-12
U_MAX = 1.0 - 1e-12


@dataclass(frozen=True)
class FragilityCurve:
    component_class: ComponentClass
    median: float  # m/s
    beta: float

    def __post_init__(self):
        if self.median <= 0 or self.beta <= 0:
            raise InvariantViolation(
                f"fragility curve '{self.component_class.value}' needs median > 0 and beta > 0"
            )

    def resistance(self, u):
        """Inverse CDF: wind speed at which the failure probability equals u."""
        u = np.clip(np.asarray(u, dtype=float), U_MIN, U_MAX)
        return self.median * np.exp(self.beta * ndtri(u))

    def failure_probability(self, wind):
        wind = np.asarray(wind, dtype=float)
        with np.errstate(divide="ignore"):
            z = np.log(np.maximum(wind, 0.0) / self.median) / self.beta
        return ndtr(z)


# Synthetic placeholders; calibrated curves are supplied per study.
DEFAULT_CURVES: dict[ComponentClass, FragilityCurve] = {
    c.component_class: c
    for c in (
        FragilityCurve(ComponentClass.TRANSMISSION_LINE, 55.0, 0.25),
        FragilityCurve(ComponentClass.TRANSMISSION_TOWER, 60.0, 0.20),
        FragilityCurve(ComponentClass.DISTRIBUTION_FEEDER, 38.0, 0.30),
        FragilityCurve(ComponentClass.UTILITY_SOLAR, 45.0, 0.25),
        FragilityCurve(ComponentClass.ROOFTOP_SOLAR, 40.0, 0.30),
    )
}


def load_fragility(path: str | os.PathLike) -> dict[ComponentClass, FragilityCurve]:
    p = Path(path)
    if not p.exists():
        raise MissingFile(str(path))
    df = pd.read_csv(p, dtype=str, keep_default_na=False, encoding="utf-8")
    missing = [c for c in FRAGILITY_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError(f"missing columns {missing}", row=0, column=missing[0], source=p.name)

    curves: dict[ComponentClass, FragilityCurve] = {}
    for i, rec in enumerate(df.to_dict(orient="records"), start=1):
        try:
            cls = ComponentClass(rec["class"].strip())
        except ValueError:
            raise ParseError(f"unknown component class '{rec['class']}'", row=i, column="class", source=p.name)
        if cls in curves:
            raise ParseError(f"duplicate curve for '{cls.value}'", row=i, column="class", source=p.name)
        values = {}
        for col in ("median_ms", "beta"):
            try:
                values[col] = float(rec[col])
            except ValueError:
                raise ParseError(f"expected a number, got '{rec[col]}'", row=i, column=col, source=p.name)
        curves[cls] = FragilityCurve(cls, values["median_ms"], values["beta"])
    logger.info(f"Loaded {len(curves)} fragility curves from {p.name}")
    return curves


def write_fragility(curves: dict[ComponentClass, FragilityCurve], path: str | os.PathLike) -> None:
    pd.DataFrame(
        [[c.component_class.value, repr(c.median), repr(c.beta)] for c in curves.values()],
        columns=FRAGILITY_COLUMNS,
    ).to_csv(path, index=False)
