from __future__ import annotations

from typing import Tuple

from pydantic import BaseModel, ConfigDict


class Axis(BaseModel):
    """One coordinate x_i of a space, discretized into `cells` uniform cells on [min, max]."""

    model_config = ConfigDict(frozen=True)

    name: str
    min: float
    max: float
    cells: int

    @property
    def width(self) -> float:
        return (self.max - self.min) / self.cells


class Space(BaseModel):
    """X = (x_1, ..., x_n). No axes is a point space (a classical place)."""

    model_config = ConfigDict(frozen=True)

    id: str
    axes: Tuple[Axis, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.axes)

    def axis(self, name: str) -> Axis:
        for axis in self.axes:
            if axis.name == name:
                return axis
        raise KeyError(f"Space {self.id} has no axis {name!r}")


class Grid(BaseModel):
    """Rectangular discretization of a space; build it with `services.grids.build_grid`."""

    model_config = ConfigDict(frozen=True)

    space: Space
    shape: Tuple[int, ...]
    total_cells: int
    cell_volume: float

    @property
    def dimension(self) -> int:
        return len(self.shape)
