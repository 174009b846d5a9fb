from __future__ import annotations

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class SourceLocation(BaseModel):
    """Where a finding points: a model-file position, a declared element, or both."""

    line: Optional[int] = None
    column: Optional[int] = None
    element: Optional[str] = None

    def __str__(self) -> str:
        parts = []
        if self.line is not None:
            parts.append(f"{self.line}:{self.column or 1}")
        if self.element:
            parts.append(self.element)
        return " ".join(parts) or "<unknown>"


class Diagnostic(BaseModel):
    severity: Severity = Severity.ERROR
    code: str
    message: str
    location: Optional[SourceLocation] = None
    step: Optional[int] = None
    cell_index: Optional[int] = None
    value: Optional[float] = None

    def to_json_dict(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)


class Diagnostics(BaseModel):
    items: List[Diagnostic] = Field(default_factory=list)

    @property
    def errors(self) -> List[Diagnostic]:
        return [d for d in self.items if d.severity == Severity.ERROR]

    @property
    def warnings(self) -> List[Diagnostic]:
        return [d for d in self.items if d.severity == Severity.WARNING]

    @property
    def runnable(self) -> bool:
        return not self.errors

    def codes(self) -> List[str]:
        return [d.code for d in self.items]

    def __iter__(self):  # type: ignore[override]
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)
