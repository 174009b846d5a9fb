"""Classification of a system along the properties the engine can decide from its structure."""

from __future__ import annotations

from enum import Enum
from typing import Dict, List, Set

from pydantic import BaseModel

from ..models.system import CHTWSystem
from .fields import is_stationary


class Topology(str, Enum):
    EMPTY = "empty"
    LINEAR = "linear"
    TREE = "tree"
    NETWORK = "network"


class Classification(BaseModel):
    homogeneity: str
    topology: Topology
    feedback: bool
    stationarity: str
    parametric_dependency: str = "functionally_independent"
    structure: str = "constant"
    uncertainty: str = "deterministic"
    temporality: str = "discrete"
    brane_dimensions: Dict[str, int]


def _brane_graph(system: CHTWSystem) -> Dict[str, List[str]]:
    graph: Dict[str, List[str]] = {b.id: [] for b in [*system.cbranes, *system.tbranes]}
    for carrier in [*system.hcarriers, *system.wcarriers]:
        if carrier.source in graph and carrier.target in graph:
            graph[carrier.source].append(carrier.target)
    return graph


def _has_cycle(graph: Dict[str, List[str]]) -> bool:
    visiting: Set[str] = set()
    done: Set[str] = set()

    def visit(node: str) -> bool:
        visiting.add(node)
        for succ in graph[node]:
            if succ in visiting or (succ not in done and visit(succ)):
                return True
        visiting.discard(node)
        done.add(node)
        return False

    return any(node not in done and visit(node) for node in graph)


def _topology(graph: Dict[str, List[str]], cyclic: bool) -> Topology:
    if not any(graph.values()):
        return Topology.EMPTY
    if cyclic:
        return Topology.NETWORK
    in_degree = {node: 0 for node in graph}
    for targets in graph.values():
        for target in targets:
            in_degree[target] += 1
    if any(count > 1 for count in in_degree.values()):
        return Topology.NETWORK
    if all(len(targets) <= 1 for targets in graph.values()):
        return Topology.LINEAR
    return Topology.TREE


def classify_system(system: CHTWSystem) -> Classification:
    dimensions = {
        brane.id: dim
        for brane in [*system.cbranes, *system.tbranes]
        if (dim := system.brane_dimension(brane.id)) is not None
    }
    graph = _brane_graph(system)
    cyclic = _has_cycle(graph)
    return Classification(
        homogeneity="homogeneous" if len(set(dimensions.values())) <= 1 else "heterogeneous",
        topology=_topology(graph, cyclic),
        feedback=cyclic,
        stationarity="stationary" if is_stationary(system) else "non_stationary",
        brane_dimensions=dimensions,
    )
