from __future__ import annotations

from typing import Optional

import numpy as np

from ..models.space import Grid
from ..models.system import CHTWSystem, HCarrier, MarkFunction, ScheduledField, TBrane, WCarrier
from ..models.trace import ParameterOverrides, SystemState
from .compiler import CompiledSystem
from .grids import build_grid


def field_at_step(field: ScheduledField, k: int) -> np.ndarray:
    """Values of the entry with the greatest start_step <= k."""
    return field.at(k)


def total_resource(mark: MarkFunction | np.ndarray, grid: Grid) -> float:
    """Volume-weighted integral of a mark function; a token count on point spaces."""
    values = mark.values if isinstance(mark, MarkFunction) else mark
    return float(np.sum(values) * grid.cell_volume)


def system_total_resource(system: CHTWSystem | CompiledSystem, state: SystemState) -> float:
    """M: sum of per-brane totals of `state` over the C-branes of `system`."""
    if isinstance(system, CompiledSystem):
        grids = system.c_grids
    else:
        spaces = {space.id: build_grid(space) for space in system.spaces}
        grids = {c.id: spaces[c.space] for c in system.cbranes}
    return float(sum(total_resource(state.marks[brane], grid) for brane, grid in grids.items()))


def is_stationary(system: CHTWSystem) -> bool:
    fields = [t.rate for t in system.tbranes] + [h.threshold for h in system.hcarriers]
    fields += [w.operator for w in system.wcarriers if w.operator is not None]
    return all(field.is_stationary for field in fields)


def threshold_at(carrier: HCarrier, k: int, overrides: Optional[ParameterOverrides] = None) -> np.ndarray:
    if overrides is not None and carrier.id in overrides.thresholds:
        return overrides.thresholds[carrier.id]
    return field_at_step(carrier.threshold, k)


def rate_at(tbrane: TBrane, k: int, overrides: Optional[ParameterOverrides] = None) -> np.ndarray:
    if overrides is not None and tbrane.id in overrides.rates:
        return overrides.rates[tbrane.id]
    return field_at_step(tbrane.rate, k)


def operator_at(carrier: WCarrier, k: int, overrides: Optional[ParameterOverrides] = None) -> np.ndarray:
    """Gain array (pointwise) or kernel matrix (kernel mode) in force at step k."""
    if overrides is not None and carrier.id in overrides.operators:
        return overrides.operators[carrier.id]
    operator = carrier.operator
    if operator is None:
        raise ValueError(f"W-carrier {carrier.id} has no {carrier.mode.value} operator")
    return field_at_step(operator, k)
