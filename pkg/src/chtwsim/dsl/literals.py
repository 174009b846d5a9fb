"""
Field and kernel literals as parsed, before they are sampled on a grid.

    const <r> | values [v, ...] | csv "<path>"
    box [<a>, <b>] axis <name> inside <r> outside <r>
    schedule { <k>: <literal>, ... }

Kernel literals use `uniform <r>`, `csv "<path>"` or `values [[...], ...]`
(one row per source cell).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import CHTWError, FieldFileError
from ..models.diagnostics import SourceLocation
from ..models.space import Grid
from ..models.system import ScheduledField
from ..services.grids import cell_centers
from .csv_fields import load_field_csv, load_kernel_csv


class LiteralError(CHTWError):
    code = "FIELD_SHAPE_MISMATCH"


@dataclass(frozen=True)
class Const:
    value: float
    location: SourceLocation


@dataclass(frozen=True)
class Values:
    values: Tuple[float, ...]
    location: SourceLocation


@dataclass(frozen=True)
class Box:
    low: float
    high: float
    axis: str
    inside: float
    outside: float
    location: SourceLocation


@dataclass(frozen=True)
class Csv:
    path: str
    location: SourceLocation


@dataclass(frozen=True)
class Uniform:
    value: float
    location: SourceLocation


@dataclass(frozen=True)
class Rows:
    rows: Tuple[Tuple[float, ...], ...]
    location: SourceLocation


@dataclass(frozen=True)
class Schedule:
    entries: Tuple[Tuple[int, "Literal"], ...]
    location: SourceLocation


Literal = Union[Const, Values, Box, Csv, Uniform, Rows, Schedule]


def _csv_path(literal: Csv, base_dir: Optional[Path]) -> Path:
    path = Path(literal.path)
    return path if path.is_absolute() or base_dir is None else base_dir / path


def sample_field(literal: Literal, grid: Grid, base_dir: Optional[Path] = None) -> np.ndarray:
    cells = grid.total_cells
    if isinstance(literal, Const):
        return np.full(cells, literal.value)
    if isinstance(literal, Values):
        if len(literal.values) != cells:
            raise LiteralError(
                f"{len(literal.values)} values for space {grid.space.id} with {cells} cells",
                location=literal.location,
            )
        return np.array(literal.values, dtype=np.float64)
    if isinstance(literal, Box):
        names = [axis.name for axis in grid.space.axes]
        if literal.axis not in names:
            raise LiteralError(f"space {grid.space.id} has no axis {literal.axis!r}", location=literal.location)
        coords = cell_centers(grid)[:, names.index(literal.axis)]
        inside = (coords >= literal.low) & (coords <= literal.high)
        return np.where(inside, literal.inside, literal.outside).astype(np.float64)
    if isinstance(literal, Csv):
        try:
            return load_field_csv(_csv_path(literal, base_dir), grid)
        except FieldFileError as e:
            raise LiteralError(e.message, location=literal.location, code=_file_code(e)) from e
    raise LiteralError(f"{type(literal).__name__.lower()} is not a field literal", location=literal.location)


def sample_kernel(literal: Literal, source: Grid, target: Grid, base_dir: Optional[Path] = None) -> np.ndarray:
    shape = (source.total_cells, target.total_cells)
    if isinstance(literal, Uniform):
        return np.full(shape, literal.value)
    if isinstance(literal, Rows):
        matrix = np.array(literal.rows, dtype=np.float64) if _rectangular(literal.rows) else None
        if matrix is None or matrix.shape != shape:
            raise LiteralError(f"kernel rows do not form a {shape[0]}x{shape[1]} matrix", location=literal.location)
        return matrix
    if isinstance(literal, Csv):
        try:
            return load_kernel_csv(_csv_path(literal, base_dir), source, target)
        except FieldFileError as e:
            raise LiteralError(e.message, location=literal.location, code=_file_code(e)) from e
    raise LiteralError(f"{type(literal).__name__.lower()} is not a kernel literal", location=literal.location)


def _rectangular(rows: Tuple[Tuple[float, ...], ...]) -> bool:
    return len({len(row) for row in rows}) == 1


def _file_code(error: FieldFileError) -> str:
    return "FIELD_SHAPE_MISMATCH" if error.code == "LENGTH_MISMATCH" else error.code


def to_scheduled(literal: Literal, sample) -> ScheduledField:
    """Sample a literal (or each schedule entry) with `sample(literal) -> ndarray`."""
    if isinstance(literal, Schedule):
        return ScheduledField.from_schedule({k: sample(entry) for k, entry in literal.entries})
    return ScheduledField.from_values(sample(literal))
