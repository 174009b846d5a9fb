"""
Structural validation of a CHTW-system.

Findings are collected, never raised, so one pass reports everything wrong
with a model. Severity ERROR makes the system unrunnable.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Dict, List, Optional

import numpy as np

from ..errors import InvalidAxisError
from ..models.diagnostics import Diagnostic, Diagnostics, Severity, SourceLocation
from ..models.space import Grid
from ..models.system import CHTWSystem, ScheduledField, WMode
from .grids import build_grid


_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"space", "cbrane", "tbrane", "hcarrier", "wcarrier"}


class SystemValidator:
    def __init__(self, system: CHTWSystem):
        self.system = system
        self.items: List[Diagnostic] = []
        self.grids: Dict[str, Grid] = {}

    def run(self) -> Diagnostics:
        self._check_spaces()
        self._check_identifiers()
        self._check_duplicate_ids()
        self._check_cbranes()
        self._check_tbranes()
        self._check_hcarriers()
        self._check_wcarriers()
        self._check_isolated()
        return Diagnostics(items=self.items)

    def _add(
        self,
        code: str,
        message: str,
        element: Optional[str] = None,
        severity: Severity = Severity.ERROR,
    ) -> None:
        location = SourceLocation(element=element) if element else None
        self.items.append(Diagnostic(severity=severity, code=code, message=message, location=location))

    def _check_spaces(self) -> None:
        for space in self.system.spaces:
            try:
                self.grids[space.id] = build_grid(space)
            except InvalidAxisError as e:
                self._add("INVALID_AXIS", e.message, f"space {space.id}")

    def _check_identifiers(self) -> None:
        names = [(s.id, f"space {s.id}") for s in self.system.spaces]
        names += [(a.name, f"space {s.id}") for s in self.system.spaces for a in s.axes]
        for element in [*self.system.cbranes, *self.system.tbranes, *self.system.hcarriers, *self.system.wcarriers]:
            names.append((element.id, element.id))
        for name, where in names:
            if not _IDENTIFIER.fullmatch(name) or name in _RESERVED:
                self._add("INVALID_ID", f"{name!r} is not a usable identifier", where)

    def _check_duplicate_ids(self) -> None:
        declared = [("space", s.id) for s in self.system.spaces]
        declared += [("cbrane", b.id) for b in self.system.cbranes] + [("tbrane", b.id) for b in self.system.tbranes]
        declared += [("hcarrier", h.id) for h in self.system.hcarriers]
        declared += [("wcarrier", w.id) for w in self.system.wcarriers]
        kinds: Dict[str, List[str]] = {}
        for kind, ident in declared:
            kinds.setdefault(ident, []).append(kind)
        for ident, found in kinds.items():
            if len(found) > 1:
                message = f"id {ident!r} declared {len(found)} times ({', '.join(found)})"
                self._add("DUPLICATE_ID", message, f"{found[0]} {ident}")

    def _grid_of(self, space_id: str, element: str) -> Optional[Grid]:
        if space_id not in self.system.spaces_by_id:
            self._add("UNKNOWN_REFERENCE", f"{element} lives on undeclared space {space_id!r}", element)
            return None
        return self.grids.get(space_id)

    def _check_array(self, values: np.ndarray, shape: tuple, what: str, element: str) -> bool:
        if values.shape != shape:
            self._add("SHAPE_MISMATCH", f"{what} has shape {values.shape}, expected {shape}", element)
            return False
        if not np.all(np.isfinite(values)):
            self._add("NON_FINITE_VALUE", f"{what} contains non-finite values", element)
            return False
        return True

    def _check_schedule(self, field: ScheduledField, shape: tuple, what: str, element: str) -> None:
        starts = field.start_steps
        if not starts or starts[0] != 0 or any(b <= a for a, b in zip(starts, starts[1:])):
            self._add(
                "SCHEDULE_ORDER",
                f"{what} schedule must start at step 0 with strictly increasing steps, got {list(starts)}",
                element,
            )
        for entry in field.entries:
            label = f"{what} (from step {entry.start_step})"
            if self._check_array(entry.values, shape, label, element) and np.any(entry.values < 0):
                self._add("NEGATIVE_PARAMETER", f"{label} has negative values", element)

    def _check_cbranes(self) -> None:
        for brane in self.system.cbranes:
            element = f"cbrane {brane.id}"
            grid = self._grid_of(brane.space, element)
            if brane.initial.brane != brane.id:
                self._add("MARK_BRANE_MISMATCH", f"initial mark belongs to {brane.initial.brane!r}", element)
            if grid is None:
                continue
            values = brane.initial.values
            if self._check_array(values, (grid.total_cells,), "initial mark", element) and np.any(values < 0):
                self._add("NEGATIVE_INITIAL_MARK", "initial mark has negative values", element)

    def _check_tbranes(self) -> None:
        for brane in self.system.tbranes:
            element = f"tbrane {brane.id}"
            grid = self._grid_of(brane.space, element)
            if grid is not None:
                self._check_schedule(brane.rate, (grid.total_cells,), "rate", element)

    def _check_endpoints(self, carrier_id: str, source: str, target: str, wants_c_source: bool) -> bool:
        element = f"{'hcarrier' if wants_c_source else 'wcarrier'} {carrier_id}"
        c_ids, t_ids = self.system.cbranes_by_id, self.system.tbranes_by_id
        expected_source, expected_target = (c_ids, t_ids) if wants_c_source else (t_ids, c_ids)
        ok = True
        for endpoint, expected, label in ((source, expected_source, "source"), (target, expected_target, "target")):
            if endpoint in expected:
                continue
            ok = False
            if endpoint in c_ids or endpoint in t_ids:
                self._add(
                    "WRONG_ENDPOINT_KIND",
                    f"{label} {endpoint!r} is a brane of the wrong type; carriers only join C- and T-branes",
                    element,
                )
            else:
                self._add("UNKNOWN_REFERENCE", f"{label} {endpoint!r} is not a declared brane", element)
        return ok

    def _check_hcarriers(self) -> None:
        pairs = Counter((h.source, h.target) for h in self.system.hcarriers)
        for (source, target), count in pairs.items():
            if count > 1:
                self._add("DUPLICATE_CARRIER", f"{count} H-carriers join {source} -> {target}", f"cbrane {source}")

        for carrier in self.system.hcarriers:
            element = f"hcarrier {carrier.id}"
            if not self._check_endpoints(carrier.id, carrier.source, carrier.target, wants_c_source=True):
                continue
            source_space = self.system.cbranes_by_id[carrier.source].space
            target_space = self.system.tbranes_by_id[carrier.target].space
            if source_space != target_space:
                self._add(
                    "PROP3_VIOLATION",
                    f"{carrier.source} (space {source_space}) and {carrier.target} (space {target_space}) "
                    "must be realized on the same space",
                    element,
                )
                continue
            grid = self.grids.get(source_space)
            if grid is not None:
                self._check_schedule(carrier.threshold, (grid.total_cells,), "threshold", element)

    def _check_wcarriers(self) -> None:
        pairs = Counter((w.source, w.target) for w in self.system.wcarriers)
        for (source, target), count in pairs.items():
            if count > 1:
                self._add("DUPLICATE_CARRIER", f"{count} W-carriers join {source} -> {target}", f"tbrane {source}")

        for carrier in self.system.wcarriers:
            element = f"wcarrier {carrier.id}"
            if not self._check_endpoints(carrier.id, carrier.source, carrier.target, wants_c_source=False):
                continue
            source_space = self.system.tbranes_by_id[carrier.source].space
            target_space = self.system.cbranes_by_id[carrier.target].space
            source_grid = self.grids.get(source_space)
            target_grid = self.grids.get(target_space)

            if carrier.mode == WMode.POINTWISE:
                if carrier.gain is None:
                    self._add("MISSING_OPERATOR", "pointwise carrier needs a gain field", element)
                    continue
                if source_space != target_space:
                    self._add(
                        "POINTWISE_SPACE_MISMATCH",
                        f"pointwise gain needs one space, got {source_space} -> {target_space}; use a kernel",
                        element,
                    )
                    continue
                if source_grid is not None:
                    self._check_schedule(carrier.gain, (source_grid.total_cells,), "gain", element)
            else:
                if carrier.kernel is None:
                    self._add("MISSING_OPERATOR", "kernel carrier needs a kernel", element)
                    continue
                if source_grid is not None and target_grid is not None:
                    shape = (source_grid.total_cells, target_grid.total_cells)
                    self._check_schedule(carrier.kernel, shape, "kernel", element)

    def _check_isolated(self) -> None:
        connected = {h.source for h in self.system.hcarriers} | {h.target for h in self.system.hcarriers}
        connected |= {w.source for w in self.system.wcarriers} | {w.target for w in self.system.wcarriers}
        for brane in [*self.system.cbranes, *self.system.tbranes]:
            if brane.id not in connected:
                self._add(
                    "ISOLATED_BRANE",
                    f"{brane.id} has no carriers",
                    f"brane {brane.id}",
                    severity=Severity.WARNING,
                )


def validate_system(system: CHTWSystem) -> Diagnostics:
    return SystemValidator(system).run()
