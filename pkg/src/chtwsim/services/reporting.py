"""
Run outputs: trace.csv, summary.json and gnuplot-style plot data.

Numbers are written with a fixed number of significant digits so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

from ..errors import CHTWError
from ..models.space import Axis, Space
from ..models.trace import Trace
from .compiler import CompiledSystem
from .grids import build_grid, cell_center, multi_index

TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.json"
TRACE_HEADER = ["step", "brane", "cell_index", "value"]


def format_number(value: float, digits: int = 12) -> str:
    if value == 0:
        value = 0.0  # drop the sign of -0.0
    return format(value, f".{digits}g")


def _rounded(value: float, digits: int) -> float:
    return float(format_number(value, digits))


def trace_rows(trace: Trace, compiled: CompiledSystem, digits: int = 12) -> Iterator[List[str]]:
    for state in trace.states:
        for brane in compiled.system.c_order:
            for cell, value in enumerate(state.marks[brane]):
                yield [str(state.step), brane, str(cell), format_number(float(value), digits)]


def write_trace_csv(path: Path, trace: Trace, compiled: CompiledSystem, digits: int = 12) -> int:
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in trace_rows(trace, compiled, digits):
            writer.writerow(row)
            count += 1
    return count


def build_summary(
    trace: Trace,
    compiled: CompiledSystem,
    digits: int = 12,
    model: Optional[str] = None,
    aborted: bool = False,
) -> Dict[str, Any]:
    system = compiled.system
    grids = {}
    for brane in system.cbranes:
        space = system.spaces_by_id[brane.space]
        grids[brane.id] = {"space": space.id, "axes": [axis.model_dump() for axis in space.axes]}

    return {
        "model": model,
        "options": {
            "steps": trace.options.steps,
            "strict": trace.options.strict,
            "sample_every": trace.options.sample_every,
        },
        "aborted": aborted,
        "c_order": system.c_order,
        "t_order": system.t_order,
        "grids": grids,
        "recorded_steps": trace.recorded_steps,
        "integral_resource": [_rounded(m, digits) for m in trace.integral_resource],
        "brane_totals": {b: [_rounded(v, digits) for v in totals] for b, totals in trace.brane_totals.items()},
        "firing_counts": {t: [report.firing_counts[t] for report in trace.reports] for t in system.t_order},
        "diagnostics": [
            {**d.to_json_dict(), **({"value": _rounded(d.value, digits)} if d.value is not None else {})}
            for d in trace.diagnostics
        ],
    }


def write_summary(path: Path, summary: Dict[str, Any]) -> None:
    path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")


class PlotDataError(CHTWError):
    code = "PLOT_DATA_MISSING"


def plot_rows(trace_path: Path, brane: str, step: int, digits: int = 12) -> List[str]:
    """
    Coordinates then value, one cell per line, for one brane at one recorded step.

    Needs the summary.json written next to the trace for the brane's axes.
    Dimension >= 2 inserts a blank line whenever the first-axis index changes.
    """
    summary = json.loads((trace_path.parent / SUMMARY_FILE).read_text(encoding="utf-8"))
    if brane not in summary["grids"]:
        raise PlotDataError(f"brane {brane!r} is not in {trace_path}")
    layout = summary["grids"][brane]
    grid = build_grid(Space(id=layout["space"], axes=tuple(Axis(**axis) for axis in layout["axes"])))

    values: Dict[int, str] = {}
    with open(trace_path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            if row["brane"] == brane and int(row["step"]) == step:
                values[int(row["cell_index"])] = row["value"]
    if not values:
        raise PlotDataError(f"step {step} of brane {brane!r} is not recorded in {trace_path}")
    if len(values) != grid.total_cells:
        raise PlotDataError(f"{trace_path} has {len(values)} of {grid.total_cells} cells for {brane!r} at step {step}")

    lines: List[str] = []
    previous_outer: Optional[int] = None
    for cell in range(grid.total_cells):
        if grid.dimension >= 2:
            outer = multi_index(grid, cell)[0]
            if previous_outer is not None and outer != previous_outer:
                lines.append("")
            previous_outer = outer
        coords = [format_number(x, digits) for x in cell_center(grid, cell)]
        lines.append(" ".join([*coords, values[cell]]))
    return lines
