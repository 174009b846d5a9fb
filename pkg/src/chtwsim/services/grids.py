"""
Rectangular discretization of spaces.

Every field in a system is a flat array over one of these grids, indexed
row-major with the first axis varying slowest.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from ..errors import IndexOutOfRangeError, InvalidAxisError
from ..models.space import Grid, Space


def build_grid(space: Space) -> Grid:
    seen: set[str] = set()
    for axis in space.axes:
        if axis.name in seen:
            raise InvalidAxisError(f"Space {space.id} declares axis {axis.name!r} twice")
        seen.add(axis.name)
        if not (math.isfinite(axis.min) and math.isfinite(axis.max)) or not axis.max > axis.min:
            raise InvalidAxisError(f"Axis {axis.name!r} of space {space.id} needs finite max > min")
        if axis.cells < 1:
            raise InvalidAxisError(f"Axis {axis.name!r} of space {space.id} needs at least one cell")

    shape = tuple(axis.cells for axis in space.axes)
    return Grid(
        space=space,
        shape=shape,
        total_cells=math.prod(shape),
        cell_volume=math.prod(axis.width for axis in space.axes),
    )


def _check_index(grid: Grid, linear_index: int) -> None:
    if not 0 <= linear_index < grid.total_cells:
        raise IndexOutOfRangeError(
            f"Cell index {linear_index} outside [0, {grid.total_cells}) on space {grid.space.id}"
        )


def multi_index(grid: Grid, linear_index: int) -> Tuple[int, ...]:
    _check_index(grid, linear_index)
    if not grid.shape:
        return ()
    return tuple(int(i) for i in np.unravel_index(linear_index, grid.shape))


def linearize(grid: Grid, index: Sequence[int]) -> int:
    if len(index) != len(grid.shape) or any(not 0 <= i < n for i, n in zip(index, grid.shape)):
        raise IndexOutOfRangeError(f"Multi-index {tuple(index)} outside grid shape {grid.shape}")
    if not grid.shape:
        return 0
    return int(np.ravel_multi_index(tuple(index), grid.shape))


def cell_center(grid: Grid, linear_index: int) -> Tuple[float, ...]:
    idx = multi_index(grid, linear_index)
    return tuple(axis.min + (i + 0.5) * axis.width for axis, i in zip(grid.space.axes, idx))


def cell_centers(grid: Grid) -> np.ndarray:
    """All centers, shape [total_cells, dimension], in canonical order."""
    if not grid.shape:
        return np.zeros((1, 0))
    per_axis = [axis.min + (np.arange(axis.cells) + 0.5) * axis.width for axis in grid.space.axes]
    mesh = np.meshgrid(*per_axis, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)
