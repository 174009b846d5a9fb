from .grids import build_grid, cell_center, cell_centers, multi_index, linearize
from .fields import field_at_step, total_resource, system_total_resource, is_stationary
from .validator import SystemValidator, validate_system
from .compiler import CompiledSystem, compile_system
from .firing import heaviside, partial_firing, integral_firing, firing_intermediates, fire_all
from .dynamics import Simulator, apply_w, initial_state, step, run
from .matrix_view import (
    ConnectivityMatrices,
    UptakeMatrix,
    WMatrix,
    connectivity_matrices,
    uptake_matrix,
    w_matrix,
    matrix_step,
    export_matrices,
)
from .classifier import Classification, Topology, classify_system

__all__ = [
    "build_grid",
    "cell_center",
    "cell_centers",
    "multi_index",
    "linearize",
    "field_at_step",
    "total_resource",
    "system_total_resource",
    "is_stationary",
    "SystemValidator",
    "validate_system",
    "CompiledSystem",
    "compile_system",
    "heaviside",
    "partial_firing",
    "integral_firing",
    "firing_intermediates",
    "fire_all",
    "Simulator",
    "apply_w",
    "initial_state",
    "step",
    "run",
    "ConnectivityMatrices",
    "UptakeMatrix",
    "WMatrix",
    "connectivity_matrices",
    "uptake_matrix",
    "w_matrix",
    "matrix_step",
    "export_matrices",
    "Classification",
    "Topology",
    "classify_system",
]
