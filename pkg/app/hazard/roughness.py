"""
Surface roughness raster (ESRI ASCII grid of z0 in meters) and the log-law
factor that converts open-water wind to the local surface.
"""

import logging
import os
from pathlib import Path

import numpy as np

from app.errors import InvariantViolation, MissingFile, ParseError

logger = logging.getLogger(__name__)

OPEN_WATER_Z0 = 0.0003
REFERENCE_HEIGHT_M = 10.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter", "cellsize", "nodata_value")


def roughness_factor(z0, z0_ref: float = OPEN_WATER_Z0, height: float = REFERENCE_HEIGHT_M):
    """ln(h / z0) / ln(h / z0_ref), floored at zero."""
    z0 = np.asarray(z0, dtype=float)
    return np.maximum(np.log(height / z0) / np.log(height / z0_ref), 0.0)


class RoughnessMap:
    def __init__(
        self,
        z0: np.ndarray,
        xll: float,
        yll: float,
        cellsize: float,
        nodata: float | None = None,
        z0_ref: float = OPEN_WATER_Z0,
        reference_height: float = REFERENCE_HEIGHT_M,
        source: str = "",
    ):
        self.z0 = np.asarray(z0, dtype=float)
        self.xll = xll
        self.yll = yll
        self.cellsize = cellsize
        self.nodata = nodata
        self.z0_ref = z0_ref
        self.reference_height = reference_height
        self.source = source
        self._warned = False

        valid = self.z0 if nodata is None else self.z0[self.z0 != nodata]
        if np.any(valid <= 0):
            raise InvariantViolation(f"roughness values must be positive ({source or 'raster'})")

    @classmethod
    def uniform(cls, z0: float = OPEN_WATER_Z0, z0_ref: float = OPEN_WATER_Z0) -> "RoughnessMap":
        """A single cell covering the globe."""
        return cls(np.array([[z0]]), xll=-180.0, yll=-90.0, cellsize=360.0, z0_ref=z0_ref, source="uniform")

    @property
    def nrows(self) -> int:
        return self.z0.shape[0]

    @property
    def ncols(self) -> int:
        return self.z0.shape[1]

    def z0_at(self, lats, lons) -> np.ndarray:
        lats = np.atleast_1d(np.asarray(lats, dtype=float))
        lons = np.atleast_1d(np.asarray(lons, dtype=float))
        col = np.floor((lons - self.xll) / self.cellsize).astype(int)
        row_up = np.floor((lats - self.yll) / self.cellsize).astype(int)
        inside = (col >= 0) & (col < self.ncols) & (row_up >= 0) & (row_up < self.nrows)

        out = np.full(lats.shape, self.z0_ref)
        values = self.z0[self.nrows - 1 - row_up[inside], col[inside]]
        missing = ~inside
        if self.nodata is not None:
            hole = values == self.nodata
            values = np.where(hole, self.z0_ref, values)
            missing[np.flatnonzero(inside)[hole]] = True
        out[inside] = values

        if missing.any() and not self._warned:
            logger.warning(
                f"Roughness raster {self.source or ''} has no value at some sites; using open-water z0={self.z0_ref}"
            )
            self._warned = True
        return out

    def factor(self, lats, lons) -> np.ndarray:
        return roughness_factor(self.z0_at(lats, lons), self.z0_ref, self.reference_height)


def load_roughness(
    path: str | os.PathLike,
    z0_ref: float = OPEN_WATER_Z0,
    reference_height: float = REFERENCE_HEIGHT_M,
) -> RoughnessMap:
    p = Path(path)
    if not p.exists():
        raise MissingFile(str(path))

    header: dict[str, float] = {}
    with p.open(encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if len(parts) != 2 or parts[0].lower() not in _HEADER_KEYS:
                break
            try:
                header[parts[0].lower()] = float(parts[1])
            except ValueError:
                raise ParseError(f"bad header value '{parts[1]}'", row=len(header) + 1, column=parts[0], source=p.name)

    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise ParseError(f"missing header '{key}'", row=0, column=key, source=p.name)
    cellsize = header["cellsize"]
    if "xllcorner" in header:
        xll, yll = header["xllcorner"], header["yllcorner"]
    elif "xllcenter" in header:
        xll, yll = header["xllcenter"] - cellsize / 2, header["yllcenter"] - cellsize / 2
    else:
        raise ParseError("missing lower-left corner", row=0, column="xllcorner", source=p.name)

    try:
        z0 = np.loadtxt(p, skiprows=len(header), ndmin=2)
    except ValueError as e:
        raise ParseError(f"bad raster body: {e}", row=len(header) + 1, column="", source=p.name)
    if z0.shape != (int(header["nrows"]), int(header["ncols"])):
        raise ParseError(
            f"raster body is {z0.shape[0]}x{z0.shape[1]}, header says {int(header['nrows'])}x{int(header['ncols'])}",
            row=len(header) + 1,
            column="",
            source=p.name,
        )

    logger.info(f"Loaded roughness raster {p.name}: {z0.shape[0]}x{z0.shape[1]} cells of {cellsize} deg")
    return RoughnessMap(
        z0,
        xll=xll,
        yll=yll,
        cellsize=cellsize,
        nodata=header.get("nodata_value"),
        z0_ref=z0_ref,
        reference_height=reference_height,
        source=p.name,
    )


def write_roughness(rmap: RoughnessMap, path: str | os.PathLike) -> None:
    lines = [
        f"ncols {rmap.ncols}",
        f"nrows {rmap.nrows}",
        f"xllcorner {rmap.xll!r}",
        f"yllcorner {rmap.yll!r}",
        f"cellsize {rmap.cellsize!r}",
    ]
    if rmap.nodata is not None:
        lines.append(f"NODATA_value {rmap.nodata!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
        np.savetxt(fh, rmap.z0, fmt="%.6g")
