"""Canonical `.chtw` text for a system, plus the equivalence used for round-trip checks."""

from __future__ import annotations

from typing import List, Optional

import numpy as np

from ..models.system import CHTWSystem, ScheduledField, WMode


def _num(value: float) -> str:
    return repr(float(value))


def _field(values: np.ndarray) -> str:
    flat = values.reshape(-1)
    if flat.size and np.all(flat == flat[0]):
        return f"const {_num(flat[0])}"
    return "values [" + ", ".join(_num(v) for v in flat) + "]"


def _kernel(matrix: np.ndarray) -> str:
    if matrix.size and np.all(matrix == matrix.reshape(-1)[0]):
        return f"uniform {_num(matrix.reshape(-1)[0])}"
    rows = ("[" + ", ".join(_num(v) for v in row) + "]" for row in matrix)
    return "values [" + ", ".join(rows) + "]"


def _scheduled(field: ScheduledField, render=_field) -> str:
    if field.is_stationary:
        return render(field.entries[0].values)
    parts = ", ".join(f"{entry.start_step}: {render(entry.values)}" for entry in field.entries)
    return "schedule { " + parts + " }"


def serialize(system: CHTWSystem) -> str:
    """Declarations in registration order; inline arrays row-major."""
    lines: List[str] = []

    for space in system.spaces:
        if not space.axes:
            lines.append(f"space {space.id} {{ }}")
            continue
        lines.append(f"space {space.id} {{")
        for axis in space.axes:
            lines.append(f"  axis {axis.name} min {_num(axis.min)} max {_num(axis.max)} cells {axis.cells};")
        lines.append("}")

    for cbrane in system.cbranes:
        lines.append(f"cbrane {cbrane.id} on {cbrane.space} {{ init {_field(cbrane.initial.values)}; }}")

    for tbrane in system.tbranes:
        lines.append(f"tbrane {tbrane.id} on {tbrane.space} {{ rate {_scheduled(tbrane.rate)}; }}")

    for h in system.hcarriers:
        lines.append(
            f"hcarrier {h.id} {h.source} -> {h.target} {{ kind {h.kind.value}; threshold {_scheduled(h.threshold)}; }}"
        )

    for w in system.wcarriers:
        if w.mode == WMode.POINTWISE and w.gain is not None:
            body = f"gain {_scheduled(w.gain)};"
        elif w.kernel is not None:
            body = f"kernel {_scheduled(w.kernel, _kernel)};"
        else:
            body = ""
        lines.append(f"wcarrier {w.id} {w.source} -> {w.target} {{ mode {w.mode.value}; {body} }}")

    return "\n".join(lines) + ("\n" if lines else "")


def _fields_equal(a: Optional[ScheduledField], b: Optional[ScheduledField]) -> bool:
    if a is None or b is None:
        return a is b
    return a.start_steps == b.start_steps and all(
        x.values.shape == y.values.shape and np.array_equal(x.values, y.values) for x, y in zip(a.entries, b.entries)
    )


def systems_equivalent(a: CHTWSystem, b: CHTWSystem) -> bool:
    """Same ids, topology, grids and field values (bit-exact)."""
    if a.spaces != b.spaces:
        return False
    if [(c.id, c.space) for c in a.cbranes] != [(c.id, c.space) for c in b.cbranes]:
        return False
    if not all(np.array_equal(x.initial.values, y.initial.values) for x, y in zip(a.cbranes, b.cbranes)):
        return False
    if [(t.id, t.space) for t in a.tbranes] != [(t.id, t.space) for t in b.tbranes]:
        return False
    if not all(_fields_equal(x.rate, y.rate) for x, y in zip(a.tbranes, b.tbranes)):
        return False
    if [(h.id, h.kind, h.source, h.target) for h in a.hcarriers] != [
        (h.id, h.kind, h.source, h.target) for h in b.hcarriers
    ]:
        return False
    if not all(_fields_equal(x.threshold, y.threshold) for x, y in zip(a.hcarriers, b.hcarriers)):
        return False
    if [(w.id, w.mode, w.source, w.target) for w in a.wcarriers] != [
        (w.id, w.mode, w.source, w.target) for w in b.wcarriers
    ]:
        return False
    return all(_fields_equal(x.operator, y.operator) for x, y in zip(a.wcarriers, b.wcarriers))


__all__ = ["serialize", "systems_equivalent"]
