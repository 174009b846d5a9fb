"""Validated, index-resolved view of a system used by the stepping code."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

from loguru import logger

from ..errors import UnvalidatedSystemError
from ..models.diagnostics import Diagnostics
from ..models.space import Grid
from ..models.system import CarrierKind, CHTWSystem, HCarrier, WCarrier
from .grids import build_grid
from .validator import validate_system


@dataclass(frozen=True)
class CompiledSystem:
    system: CHTWSystem
    diagnostics: Diagnostics
    grids: Dict[str, Grid]
    incoming_h: Dict[str, List[HCarrier]] = field(default_factory=dict)
    consuming_h: Dict[str, List[HCarrier]] = field(default_factory=dict)
    incoming_w: Dict[str, List[WCarrier]] = field(default_factory=dict)

    def grid_of(self, brane_id: str) -> Grid:
        space_id = self.system.brane_space(brane_id)
        return self.grids[space_id]  # type: ignore[index]

    @property
    def c_grids(self) -> Dict[str, Grid]:
        return {c.id: self.grids[c.space] for c in self.system.cbranes}


def compile_system(system: "CHTWSystem | CompiledSystem") -> CompiledSystem:
    """
    Validate and resolve a system; raise UnvalidatedSystemError on any error diagnostic.

    Already compiled systems pass straight through.
    """
    if isinstance(system, CompiledSystem):
        return system

    diagnostics = validate_system(system)
    if not diagnostics.runnable:
        codes = ", ".join(sorted(set(d.code for d in diagnostics.errors)))
        raise UnvalidatedSystemError(f"System has {len(diagnostics.errors)} error(s): {codes}", diagnostics.errors)

    grids = {space.id: build_grid(space) for space in system.spaces}
    incoming_h: Dict[str, List[HCarrier]] = {t.id: [] for t in system.tbranes}
    consuming_h: Dict[str, List[HCarrier]] = {c.id: [] for c in system.cbranes}
    incoming_w: Dict[str, List[WCarrier]] = {c.id: [] for c in system.cbranes}
    for carrier in system.hcarriers:
        incoming_h[carrier.target].append(carrier)
        if carrier.kind == CarrierKind.NORMAL:
            consuming_h[carrier.source].append(carrier)
    for wcarrier in system.wcarriers:
        incoming_w[wcarrier.target].append(wcarrier)

    logger.debug(
        "Compiled system: {} spaces, {} C-branes, {} T-branes, {} H-carriers, {} W-carriers",
        len(system.spaces),
        len(system.cbranes),
        len(system.tbranes),
        len(system.hcarriers),
        len(system.wcarriers),
    )
    return CompiledSystem(
        system=system,
        diagnostics=diagnostics,
        grids=grids,
        incoming_h=incoming_h,
        consuming_h=consuming_h,
        incoming_w=incoming_w,
    )
