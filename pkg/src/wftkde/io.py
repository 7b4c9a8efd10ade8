"""CSV ingestion of angle data and export of density grids."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .circmath import DEFAULT_GRID, uniform_grid, wrap_angle
from .estimator import DensityEstimate

UNITS = ("radians", "degrees")
DIRECTIONS = ("counterclockwise", "clockwise_from_north")


class DataError(ValueError):
    """Malformed or missing input data."""


@dataclass(frozen=True)
class AngleDataset:
    angles: np.ndarray
    source: str
    unit: str

    @property
    def n(self) -> int:
        return self.angles.size


def _column_index(header, column: Union[str, int], path) -> int:
    if isinstance(column, int) or (isinstance(column, str) and column.isdigit()):
        idx = int(column)
        if not 0 <= idx < len(header):
            raise DataError(f"{path}: column index {idx} out of range (header has {len(header)} columns)")
        return idx
    names = [h.strip() for h in header]
    if column not in names:
        raise DataError(f"{path}: no column named {column!r}; available: {', '.join(names)}")
    return names.index(column)


def load_csv(path, column: Union[str, int] = 0, unit: str = "radians",
             direction: str = "counterclockwise") -> AngleDataset:
    """Read one column of angles from a UTF-8 CSV file with a header row.

    Values are converted to counterclockwise radians in ``[0, 2 pi)``;
    ``clockwise_from_north`` maps ``x`` to ``wrap(pi/2 - x)``. Blank cells
    are errors; row numbers in messages count the header as row 1.
    """
    if unit not in UNITS:
        raise ValueError(f"unit must be one of {UNITS}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: file is empty")
        idx = _column_index(header, column, path)
        values = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if idx >= len(row):
                raise DataError(f"{path}: row {row_no} has no value for column {idx}")
            try:
                v = float(row[idx])
            except ValueError:
                raise DataError(f"{path}: row {row_no}: cannot parse {row[idx]!r} as a number") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: row {row_no}: non-finite value {row[idx]!r}")
            values.append(v)
    if not values:
        raise DataError(f"{path}: no data rows")
    x = np.asarray(values, dtype=float)
    if unit == "degrees":
        x = np.deg2rad(x)
    if direction == "clockwise_from_north":
        x = np.pi / 2 - x
    return AngleDataset(np.asarray(wrap_angle(x), dtype=float).reshape(-1), str(path), unit)


def export_density_grid(estimate: DensityEstimate, path, grid_size: int = DEFAULT_GRID,
                        correction: str = "none") -> np.ndarray:
    """Write ``theta,density`` rows on the uniform grid; returns the density column."""
    theta = uniform_grid(grid_size)
    dens = np.asarray(estimate.grid_values(grid_size, correction), dtype=float)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(("theta", "density"))
            for th, d in zip(theta, dens):
                writer.writerow((repr(float(th)), repr(float(d))))
    except OSError as exc:
        raise OSError(f"cannot write density grid to {path}: {exc.strerror or exc}") from exc
    return dens
