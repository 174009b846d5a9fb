from .space import Axis, Space, Grid
from .system import (
    CarrierKind,
    WMode,
    FieldEntry,
    ScheduledField,
    MarkFunction,
    CBrane,
    TBrane,
    HCarrier,
    WCarrier,
    CHTWSystem,
)
from .diagnostics import Severity, SourceLocation, Diagnostic, Diagnostics
from .trace import (
    FiringField,
    FiringIntermediates,
    SystemState,
    StepReport,
    RunOptions,
    Trace,
    ParameterOverrides,
)

__all__ = [
    "Axis",
    "Space",
    "Grid",
    "CarrierKind",
    "WMode",
    "FieldEntry",
    "ScheduledField",
    "MarkFunction",
    "CBrane",
    "TBrane",
    "HCarrier",
    "WCarrier",
    "CHTWSystem",
    "Severity",
    "SourceLocation",
    "Diagnostic",
    "Diagnostics",
    "FiringField",
    "FiringIntermediates",
    "SystemState",
    "StepReport",
    "RunOptions",
    "Trace",
    "ParameterOverrides",
]
