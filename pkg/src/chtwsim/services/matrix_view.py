"""
Matrix form of the dynamics:

    |m(k+1)> = |m(k)> - R_s(k)|d(k)> + W^T(k)|d(k)>

Entries are fields or operators; they collapse to scalars only on point
spaces. `matrix_step` evaluates the equation entry by entry and is kept as
an independent cross-check of `dynamics.step`.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..models.system import CarrierKind, CHTWSystem, WCarrier, WMode
from ..models.trace import ParameterOverrides, SystemState
from .compiler import CompiledSystem, compile_system
from .dynamics import apply_w
from .fields import operator_at, rate_at
from .firing import fire_all


class ConnectivityMatrices(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c_order: List[str]
    t_order: List[str]
    s_h: np.ndarray
    s_w: np.ndarray


class UptakeMatrix(BaseModel):
    """R_s [dim C x dim T]; None marks a zero entry (no carrier, or a blocking/associative one)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: int
    c_order: List[str]
    t_order: List[str]
    entries: List[List[Optional[np.ndarray]]]

    def pattern(self) -> np.ndarray:
        return np.array([[0 if e is None else 1 for e in row] for row in self.entries], dtype=int).reshape(
            len(self.c_order), len(self.t_order)
        )

    def scalar_entry(self, i: int, j: int) -> Optional[float]:
        """Plain number for zero entries and for one-cell (point space) rates; None otherwise."""
        entry = self.entries[i][j]
        if entry is None:
            return 0.0
        return float(entry[0]) if entry.shape == (1,) else None


class WMatrix(BaseModel):
    """W [dim T x dim C] of carrier references; `transpose()` gives W^T [dim C x dim T]."""

    model_config = ConfigDict(frozen=True)

    step: int = 0
    t_order: List[str]
    c_order: List[str]
    entries: List[List[Optional[WCarrier]]]

    def transpose(self) -> List[List[Optional[WCarrier]]]:
        return [[self.entries[t][c] for t in range(len(self.t_order))] for c in range(len(self.c_order))]

    def pattern(self) -> np.ndarray:
        return np.array([[0 if e is None else 1 for e in row] for row in self.entries], dtype=int).reshape(
            len(self.t_order), len(self.c_order)
        )


def connectivity_matrices(system: CHTWSystem | CompiledSystem) -> ConnectivityMatrices:
    system = compile_system(system).system
    c_index = {c: i for i, c in enumerate(system.c_order)}
    t_index = {t: j for j, t in enumerate(system.t_order)}
    s_h = np.zeros((len(c_index), len(t_index)), dtype=int)
    s_w = np.zeros((len(t_index), len(c_index)), dtype=int)
    for h in system.hcarriers:
        s_h[c_index[h.source], t_index[h.target]] = 1
    for w in system.wcarriers:
        s_w[t_index[w.source], c_index[w.target]] = 1
    return ConnectivityMatrices(c_order=system.c_order, t_order=system.t_order, s_h=s_h, s_w=s_w)


def uptake_matrix(
    system: CHTWSystem | CompiledSystem,
    k: int,
    overrides: Optional[ParameterOverrides] = None,
) -> UptakeMatrix:
    """S_H with every normal-carrier 1 replaced by the target's rate r_t(k); A/B rows stay zero."""
    system = compile_system(system).system
    entries: List[List[Optional[np.ndarray]]] = [[None] * len(system.tbranes) for _ in system.cbranes]
    c_index = {c: i for i, c in enumerate(system.c_order)}
    t_index = {t: j for j, t in enumerate(system.t_order)}
    for h in system.hcarriers:
        if h.kind != CarrierKind.NORMAL:
            continue
        entries[c_index[h.source]][t_index[h.target]] = rate_at(system.tbranes_by_id[h.target], k, overrides)
    return UptakeMatrix(step=k, c_order=system.c_order, t_order=system.t_order, entries=entries)


def w_matrix(system: CHTWSystem | CompiledSystem, k: int = 0) -> WMatrix:
    """Carrier references at step k; `operator_at(carrier, k)` gives each entry's gain or kernel."""
    system = compile_system(system).system
    entries: List[List[Optional[WCarrier]]] = [[None] * len(system.cbranes) for _ in system.tbranes]
    c_index = {c: i for i, c in enumerate(system.c_order)}
    t_index = {t: j for j, t in enumerate(system.t_order)}
    for w in system.wcarriers:
        entries[t_index[w.source]][c_index[w.target]] = w
    return WMatrix(step=k, t_order=system.t_order, c_order=system.c_order, entries=entries)


def matrix_step(
    system: CHTWSystem | CompiledSystem,
    state: SystemState,
    overrides: Optional[ParameterOverrides] = None,
) -> SystemState:
    compiled = compile_system(system)
    k = state.step
    firing = fire_all(compiled, state.marks, k, overrides)
    d = [firing[t].values for t in compiled.system.t_order]

    r_s = uptake_matrix(compiled, k, overrides)
    w_t = w_matrix(compiled, k).transpose()

    marks: Dict[str, np.ndarray] = {}
    for i, c in enumerate(compiled.system.c_order):
        column = state.marks[c].copy()
        for j, t in enumerate(compiled.system.t_order):
            rate = r_s.entries[i][j]
            if rate is not None:
                column = column - rate * d[j]
            carrier = w_t[i][j]
            if carrier is not None:
                column = column + apply_w(carrier, d[j], k, compiled.grid_of(t), overrides)
        marks[c] = column
    return SystemState(step=k + 1, marks=marks)


def _carrier_ref(carrier: WCarrier, k: int, compiled: CompiledSystem) -> Dict[str, Any]:
    ref: Dict[str, Any] = {"carrier": carrier.id, "mode": carrier.mode.value}
    operator = operator_at(carrier, k)
    if operator.size == 1:
        # one source cell and one target cell: the operator is a number
        scale = compiled.grid_of(carrier.source).cell_volume if carrier.mode == WMode.KERNEL else 1.0
        ref["value"] = float(operator.reshape(-1)[0] * scale)
    return ref


def export_matrices(system: CHTWSystem | CompiledSystem, k: int = 0) -> Dict[str, Any]:
    """JSON-ready dump of S_H, S_W, R_s(k), W(k) and W^T(k) in declaration order."""
    compiled = compile_system(system)
    conn = connectivity_matrices(compiled)
    r_s = uptake_matrix(compiled, k)
    w = w_matrix(compiled, k)
    hcarrier_ids = {(h.source, h.target): h.id for h in compiled.system.hcarriers}

    def rate_entry(i: int, j: int) -> Any:
        scalar = r_s.scalar_entry(i, j)
        if scalar is not None:
            return scalar
        return {"tbrane": r_s.t_order[j], "carrier": hcarrier_ids[(r_s.c_order[i], r_s.t_order[j])]}

    w_entries = [[None if e is None else _carrier_ref(e, k, compiled) for e in row] for row in w.entries]
    w_t_entries = [[None if e is None else _carrier_ref(e, k, compiled) for e in row] for row in w.transpose()]
    return {
        "step": k,
        "c_order": conn.c_order,
        "t_order": conn.t_order,
        "S_H": conn.s_h.tolist(),
        "S_W": conn.s_w.tolist(),
        "R_s": [[rate_entry(i, j) for j in range(len(r_s.t_order))] for i in range(len(r_s.c_order))],
        "W": w_entries,
        "W_T": w_t_entries,
    }
