"""
Firing of T-branes.

Theta(x) is 0 for x <= 0 and 1 for x > 0, applied with exact float
comparisons. A normal carrier enables a cell where the mark exceeds both its
threshold and the T-brane's uptake rate; a blocking carrier disables cells
where the mark exceeds its threshold; an associative carrier enables cells
where the mark exceeds its threshold. The integral firing field is the
product of every incoming partial field.
"""

from __future__ import annotations

import math
from typing import Dict, Mapping, Optional, Sequence

import numpy as np
from loguru import logger

from ..errors import NonFiniteInputError, ShapeMismatchError
from ..models.system import CarrierKind, TBrane
from ..models.trace import FiringField, FiringIntermediates, ParameterOverrides
from .compiler import CompiledSystem
from .fields import rate_at, threshold_at


def heaviside(x: float) -> int:
    if not math.isfinite(x):
        raise NonFiniteInputError(f"Heaviside of non-finite value {x!r}")
    return 1 if x > 0 else 0


def heaviside_field(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError("Heaviside of a field with non-finite values")
    return (values > 0).astype(np.float64)


def _same_shape(*arrays: np.ndarray) -> None:
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) > 1:
        raise ShapeMismatchError(f"Fields on different grids: shapes {sorted(shapes)}")


def firing_intermediates(
    kind: CarrierKind,
    m: np.ndarray,
    threshold: np.ndarray,
    rate: Optional[np.ndarray] = None,
) -> FiringIntermediates:
    m = np.asarray(m, dtype=np.float64)
    threshold = np.asarray(threshold, dtype=np.float64)
    delta = m - threshold

    if kind == CarrierKind.NORMAL:
        if rate is None:
            raise ShapeMismatchError("Normal carriers need the T-brane rate field")
        rate = np.asarray(rate, dtype=np.float64)
        _same_shape(m, threshold, rate)
        delta_r = m - rate
        partial = heaviside_field(delta) * heaviside_field(delta_r)
        return FiringIntermediates(delta=delta, delta_r=delta_r, partial=partial)

    _same_shape(m, threshold)
    if kind == CarrierKind.BLOCKING:
        partial = heaviside_field(-delta)
    else:
        partial = heaviside_field(delta)
    return FiringIntermediates(delta=delta, partial=partial)


def partial_firing(
    kind: CarrierKind,
    m: np.ndarray,
    threshold: np.ndarray,
    rate: Optional[np.ndarray] = None,
) -> np.ndarray:
    """d_ip for one carrier; `rate` is ignored for blocking and associative kinds."""
    return firing_intermediates(kind, m, threshold, rate).partial


def integral_firing(tbrane: TBrane | str, partials: Sequence[np.ndarray], total_cells: int) -> FiringField:
    tbrane_id = tbrane if isinstance(tbrane, str) else tbrane.id
    values = np.ones(total_cells, dtype=np.float64)
    for partial in partials:
        if np.shape(partial) != (total_cells,):
            raise ShapeMismatchError(
                f"Partial firing of shape {np.shape(partial)} on T-brane {tbrane_id} with {total_cells} cells"
            )
        values = values * partial
    return FiringField(tbrane=tbrane_id, values=values)


def fire_all(
    compiled: CompiledSystem,
    marks: Mapping[str, np.ndarray],
    k: int,
    overrides: Optional[ParameterOverrides] = None,
) -> Dict[str, FiringField]:
    """d_p(X|k) for every T-brane, read only from the step-k marks."""
    firing: Dict[str, FiringField] = {}
    for tbrane in compiled.system.tbranes:
        grid = compiled.grids[tbrane.space]
        rate = rate_at(tbrane, k, overrides)
        partials = [
            partial_firing(carrier.kind, marks[carrier.source], threshold_at(carrier, k, overrides), rate)
            for carrier in compiled.incoming_h[tbrane.id]
        ]
        firing[tbrane.id] = integral_firing(tbrane, partials, grid.total_cells)
        logger.debug("step {} T-brane {} fires on {} cells", k, tbrane.id, firing[tbrane.id].firing_cells)
    return firing
