"""CSV field and kernel files: row-major, `.` decimals, no header, `#` comments."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from loguru import logger

from ..errors import FieldFileError
from ..models.space import Grid


def _read(path: Path | str) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise FieldFileError(f"CSV file not found: {path}", code="FILE_NOT_FOUND")
    try:
        data = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64, comments="#")
    except ValueError as e:
        raise FieldFileError(f"{path}: {e}", code="PARSE_ERROR") from e
    logger.debug("Loaded {} values from {}", data.size, path)
    return data


def load_field_csv(path: Path | str, grid: Grid) -> np.ndarray:
    """total_cells values in row-major order, one per line or comma-separated rows."""
    values = _read(path).reshape(-1)
    if values.size != grid.total_cells:
        raise FieldFileError(
            f"{path}: {values.size} values for a grid of {grid.total_cells} cells", code="LENGTH_MISMATCH"
        )
    return values


def load_kernel_csv(path: Path | str, source: Grid, target: Grid) -> np.ndarray:
    """|source| rows x |target| columns."""
    matrix = _read(path)
    if matrix.shape != (source.total_cells, target.total_cells):
        raise FieldFileError(
            f"{path}: kernel of shape {matrix.shape}, expected {(source.total_cells, target.total_cells)}",
            code="LENGTH_MISMATCH",
        )
    return matrix
