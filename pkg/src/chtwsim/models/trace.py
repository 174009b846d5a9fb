from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .diagnostics import Diagnostic
from .system import frozen_array


class FiringField(BaseModel):
    """d_p(X|k): binary field of cells where a T-brane fires."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tbrane: str
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _freeze(cls, value: Any) -> np.ndarray:
        return frozen_array(value)

    @property
    def firing_cells(self) -> int:
        return int(np.count_nonzero(self.values))


class FiringIntermediates(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: np.ndarray
    delta_r: Optional[np.ndarray] = None
    partial: np.ndarray


class SystemState(BaseModel):
    """Marking of every C-brane at step k. Never mutated; each step builds a new one."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: int = Field(ge=0)
    marks: Dict[str, np.ndarray]

    @field_validator("marks", mode="before")
    @classmethod
    def _freeze(cls, value: Dict[str, Any]) -> Dict[str, np.ndarray]:
        return {brane: frozen_array(values) for brane, values in value.items()}


class StepReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    step: int
    firing: Dict[str, FiringField]
    consumed: Dict[str, float] = Field(default_factory=dict)
    produced: Dict[str, float] = Field(default_factory=dict)
    diagnostics: List[Diagnostic] = Field(default_factory=list)

    @property
    def firing_counts(self) -> Dict[str, int]:
        return {tbrane: field.firing_cells for tbrane, field in self.firing.items()}


class RunOptions(BaseModel):
    steps: int = Field(0, ge=0)
    strict: bool = False
    sample_every: int = Field(1, ge=1)
    output_dir: Optional[Path] = None


class Trace(BaseModel):
    """
    Result of a run.

    `reports`, `integral_resource` and `brane_totals` cover every step;
    `states` holds full markings at step 0, every `sample_every` steps and
    the final step.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    options: RunOptions = Field(default_factory=RunOptions)
    states: List[SystemState] = Field(default_factory=list)
    reports: List[StepReport] = Field(default_factory=list)
    integral_resource: List[float] = Field(default_factory=list)
    brane_totals: Dict[str, List[float]] = Field(default_factory=dict)

    @property
    def recorded_steps(self) -> List[int]:
        return [state.step for state in self.states]

    @property
    def final_state(self) -> Optional[SystemState]:
        return self.states[-1] if self.states else None

    @property
    def diagnostics(self) -> List[Diagnostic]:
        return [d for report in self.reports for d in report.diagnostics]

    def state_at(self, step: int) -> Optional[SystemState]:
        for state in self.states:
            if state.step == step:
                return state
        return None


class ParameterOverrides(BaseModel):
    """
    Caller-supplied parameter values for one step, replacing the scheduled ones.

    Keys are H-carrier ids (thresholds), T-brane ids (rates) and W-carrier
    ids (gains or kernels).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    thresholds: Dict[str, np.ndarray] = Field(default_factory=dict)
    rates: Dict[str, np.ndarray] = Field(default_factory=dict)
    operators: Dict[str, np.ndarray] = Field(default_factory=dict)

    @field_validator("thresholds", "rates", "operators", mode="before")
    @classmethod
    def _freeze(cls, value: Dict[str, Any]) -> Dict[str, np.ndarray]:
        return {key: frozen_array(values) for key, values in value.items()}
