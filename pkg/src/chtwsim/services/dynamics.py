"""
Synchronous dynamics of a CHTW-system.

One step reads the step-k marking only:

    m_c(k+1) = m_c(k) - sum_{normal c->p} r_p(k) d_p(k) + sum_{p->c} w_pc(k)[d_p(k)]

Blocking and associative sources are never debited. Overdraw by several
T-branes sharing a C-brane is applied literally and reported as
NEGATIVE_RESOURCE; nothing is clamped.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from ..errors import NegativeResourceError, ShapeMismatchError
from ..models.diagnostics import Diagnostic, SourceLocation
from ..models.space import Grid
from ..models.system import CHTWSystem, WCarrier, WMode
from ..models.trace import FiringField, ParameterOverrides, RunOptions, StepReport, SystemState, Trace
from .compiler import CompiledSystem, compile_system
from .fields import operator_at, rate_at, total_resource
from .firing import fire_all

OverrideProvider = Callable[[int], Optional[ParameterOverrides]]


def apply_w(
    carrier: WCarrier,
    d: FiringField | np.ndarray,
    k: int,
    source_grid: Grid,
    overrides: Optional[ParameterOverrides] = None,
) -> np.ndarray:
    """
    Resource produced on the target grid by one W-carrier.

    Pointwise: gain(x) * d(x). Kernel: sum_x K[x, y] * d(x) * source cell volume.
    """
    values = d.values if isinstance(d, FiringField) else np.asarray(d, dtype=np.float64)
    operator = operator_at(carrier, k, overrides)
    if values.shape != (source_grid.total_cells,):
        raise ShapeMismatchError(
            f"Firing field of shape {values.shape} on source grid with {source_grid.total_cells} cells"
        )

    if carrier.mode == WMode.POINTWISE:
        if operator.shape != values.shape:
            raise ShapeMismatchError(f"Gain of {carrier.id} has shape {operator.shape}, firing {values.shape}")
        return operator * values

    if operator.ndim != 2 or operator.shape[0] != values.shape[0]:
        raise ShapeMismatchError(f"Kernel of {carrier.id} has shape {operator.shape}, firing {values.shape}")
    return (values @ operator) * source_grid.cell_volume


def initial_state(system: CHTWSystem) -> SystemState:
    return SystemState(step=0, marks={c.id: c.initial.values for c in system.cbranes})


class Simulator:
    """Steps one compiled system. Holds no marking; states are passed in and returned."""

    def __init__(self, system: CHTWSystem | CompiledSystem):
        self.compiled = compile_system(system)
        self.system = self.compiled.system

    def _check_state(self, state: SystemState) -> None:
        for brane in self.system.cbranes:
            marks = state.marks.get(brane.id)
            cells = self.compiled.grids[brane.space].total_cells
            if marks is None or marks.shape != (cells,):
                raise ShapeMismatchError(f"State at step {state.step} has no {cells}-cell mark for {brane.id}")

    def step(
        self,
        state: SystemState,
        overrides: Optional[ParameterOverrides] = None,
    ) -> Tuple[SystemState, StepReport]:
        self._check_state(state)
        k = state.step
        firing = fire_all(self.compiled, state.marks, k, overrides)

        next_marks: Dict[str, np.ndarray] = {}
        consumed: Dict[str, float] = {}
        produced: Dict[str, float] = {}
        diagnostics: List[Diagnostic] = []

        for brane in self.system.cbranes:
            grid = self.compiled.grids[brane.space]
            uptake = np.zeros(grid.total_cells)
            for carrier in self.compiled.consuming_h[brane.id]:
                tbrane = self.system.tbranes_by_id[carrier.target]
                uptake = uptake + rate_at(tbrane, k, overrides) * firing[tbrane.id].values

            production = np.zeros(grid.total_cells)
            for wcarrier in self.compiled.incoming_w[brane.id]:
                source_grid = self.compiled.grid_of(wcarrier.source)
                production = production + apply_w(wcarrier, firing[wcarrier.source], k, source_grid, overrides)

            updated = state.marks[brane.id] - uptake + production
            next_marks[brane.id] = updated
            consumed[brane.id] = total_resource(uptake, grid)
            produced[brane.id] = total_resource(production, grid)

            for cell in np.flatnonzero(updated < 0):
                value = float(updated[cell])
                diagnostics.append(
                    Diagnostic(
                        code="NEGATIVE_RESOURCE",
                        message=f"{brane.id} cell {int(cell)} is {value!r} after step {k + 1}",
                        location=SourceLocation(element=f"cbrane {brane.id}"),
                        step=k + 1,
                        cell_index=int(cell),
                        value=value,
                    )
                )

        if diagnostics:
            logger.warning("Step {} drove {} cell(s) negative", k + 1, len(diagnostics))

        report = StepReport(step=k, firing=firing, consumed=consumed, produced=produced, diagnostics=diagnostics)
        return SystemState(step=k + 1, marks=next_marks), report

    def totals(self, state: SystemState) -> Dict[str, float]:
        grids = self.compiled.c_grids
        return {brane: total_resource(state.marks[brane], grid) for brane, grid in grids.items()}

    def run(
        self,
        steps: int,
        options: Optional[RunOptions] = None,
        overrides: Optional[OverrideProvider] = None,
    ) -> Trace:
        options = (options or RunOptions()).model_copy(update={"steps": steps})
        state = initial_state(self.system)
        trace = Trace(options=options, brane_totals={c.id: [] for c in self.system.cbranes})
        self._record(trace, state, force=True)
        logger.info("Running {} step(s) on {} C-branes", steps, len(self.system.cbranes))

        for _ in range(steps):
            k = state.step
            state, report = self.step(state, overrides(k) if overrides else None)
            trace.reports.append(report)
            abort = options.strict and bool(report.diagnostics)
            self._record(trace, state, force=abort or state.step == steps)
            if abort:
                raise NegativeResourceError(
                    f"Negative resource after step {state.step} ({len(report.diagnostics)} cell(s))", trace
                )

        logger.info("Run finished at step {} with M = {}", state.step, trace.integral_resource[-1])
        return trace

    def _record(self, trace: Trace, state: SystemState, force: bool = False) -> None:
        totals = self.totals(state)
        for brane, total in totals.items():
            trace.brane_totals[brane].append(total)
        trace.integral_resource.append(float(sum(totals.values())))
        if force or state.step % trace.options.sample_every == 0:
            trace.states.append(state)


def step(
    system: CHTWSystem | CompiledSystem,
    state: SystemState,
    overrides: Optional[ParameterOverrides] = None,
) -> Tuple[SystemState, StepReport]:
    return Simulator(system).step(state, overrides)


def run(
    system: CHTWSystem | CompiledSystem,
    steps: int,
    options: Optional[RunOptions] = None,
    overrides: Optional[OverrideProvider] = None,
) -> Trace:
    return Simulator(system).run(steps, options, overrides)
