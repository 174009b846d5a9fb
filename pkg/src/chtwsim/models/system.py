"""
The fivetuple Xi = (C, H, T, W, M) and its parameter fields.

Arrays are stored as read-only float64 numpy arrays so a built system can be
shared between concurrent runs without copying.
"""

from __future__ import annotations

import bisect
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .space import Space


def frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


class CarrierKind(str, Enum):
    NORMAL = "normal"
    BLOCKING = "blocking"
    ASSOCIATIVE = "associative"


class WMode(str, Enum):
    POINTWISE = "pointwise"
    KERNEL = "kernel"


class FieldEntry(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    start_step: int
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        return frozen_array(value)


class ScheduledField(BaseModel):
    """
    Piecewise-constant parameter field over steps.

    A single entry is the stationary case. For kernels each entry holds a
    [source cells x target cells] matrix instead of a flat array.
    """

    model_config = ConfigDict(frozen=True)

    entries: Tuple[FieldEntry, ...]

    @classmethod
    def constant(cls, value: float, size: int) -> "ScheduledField":
        return cls(entries=(FieldEntry(start_step=0, values=np.full(size, float(value))),))

    @classmethod
    def from_values(cls, values: Any) -> "ScheduledField":
        return cls(entries=(FieldEntry(start_step=0, values=values),))

    @classmethod
    def from_schedule(cls, schedule: Dict[int, Any]) -> "ScheduledField":
        return cls(entries=tuple(FieldEntry(start_step=k, values=v) for k, v in sorted(schedule.items())))

    @property
    def start_steps(self) -> Tuple[int, ...]:
        return tuple(entry.start_step for entry in self.entries)

    @property
    def is_stationary(self) -> bool:
        return len(self.entries) == 1

    def at(self, k: int) -> np.ndarray:
        index = bisect.bisect_right(self.start_steps, k) - 1
        return self.entries[max(index, 0)].values


class MarkFunction(BaseModel):
    """m(X|k): resource of one C-brane sampled at cell centers."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    brane: str
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        return frozen_array(value)


class CBrane(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    space: str
    initial: MarkFunction


class TBrane(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    space: str
    rate: ScheduledField


class HCarrier(BaseModel):
    """Threshold carrier C -> T; blocking and associative carriers are kinds of it."""

    model_config = ConfigDict(frozen=True)

    id: str
    kind: CarrierKind = CarrierKind.NORMAL
    source: str
    target: str
    threshold: ScheduledField


class WCarrier(BaseModel):
    """Transformation carrier T -> C: pointwise gain on a shared space or a cross-space kernel."""

    model_config = ConfigDict(frozen=True)

    id: str
    source: str
    target: str
    mode: WMode = WMode.POINTWISE
    gain: Optional[ScheduledField] = None
    kernel: Optional[ScheduledField] = None

    @property
    def operator(self) -> Optional[ScheduledField]:
        return self.gain if self.mode == WMode.POINTWISE else self.kernel


class CHTWSystem(BaseModel):
    """
    Xi = (C, H, T, W, M) plus the registry of spaces.

    Tuples keep declaration order, which is the canonical row/column order
    of every matrix and output file. M is carried by each C-brane's initial
    mark function.
    """

    model_config = ConfigDict(frozen=True)

    spaces: Tuple[Space, ...] = ()
    cbranes: Tuple[CBrane, ...] = ()
    tbranes: Tuple[TBrane, ...] = ()
    hcarriers: Tuple[HCarrier, ...] = ()
    wcarriers: Tuple[WCarrier, ...] = ()

    @property
    def spaces_by_id(self) -> Dict[str, Space]:
        return {s.id: s for s in self.spaces}

    @property
    def cbranes_by_id(self) -> Dict[str, CBrane]:
        return {c.id: c for c in self.cbranes}

    @property
    def tbranes_by_id(self) -> Dict[str, TBrane]:
        return {t.id: t for t in self.tbranes}

    @property
    def c_order(self) -> list[str]:
        return [c.id for c in self.cbranes]

    @property
    def t_order(self) -> list[str]:
        return [t.id for t in self.tbranes]

    @property
    def initial_marking(self) -> Dict[str, MarkFunction]:
        return {c.id: c.initial for c in self.cbranes}

    def brane_space(self, brane_id: str) -> Optional[str]:
        brane = self.cbranes_by_id.get(brane_id) or self.tbranes_by_id.get(brane_id)
        return brane.space if brane is not None else None

    def brane_dimension(self, brane_id: str) -> Optional[int]:
        space_id = self.brane_space(brane_id)
        space = self.spaces_by_id.get(space_id) if space_id is not None else None
        return space.dimension if space is not None else None
