"""Exception hierarchy shared by the engine, the DSL and the CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, List, Optional

if TYPE_CHECKING:
    from .models.diagnostics import Diagnostic, SourceLocation


class CHTWError(ValueError):
    """Base error. `code` is the stable machine-readable identifier."""

    code = "CHTW_ERROR"

    def __init__(self, message: str, *, location: Optional["SourceLocation"] = None, code: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.location = location
        if code is not None:
            self.code = code

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"severity": "error", "code": self.code, "message": self.message}
        if self.location is not None:
            payload["location"] = self.location.model_dump()
        return payload


class InvalidAxisError(CHTWError):
    code = "INVALID_AXIS"


class IndexOutOfRangeError(CHTWError):
    code = "INDEX_OUT_OF_RANGE"


class NonFiniteInputError(CHTWError):
    code = "NON_FINITE_INPUT"


class ShapeMismatchError(CHTWError):
    code = "SHAPE_MISMATCH"


class FieldFileError(CHTWError):
    """Raised while reading CSV field or kernel data (LENGTH_MISMATCH / PARSE_ERROR)."""

    code = "PARSE_ERROR"


class UnvalidatedSystemError(CHTWError):
    code = "UNVALIDATED_SYSTEM"

    def __init__(self, message: str, diagnostics: List["Diagnostic"]):
        super().__init__(message)
        self.diagnostics = diagnostics


class NegativeResourceError(CHTWError):
    """Strict runs abort with this once any cell goes negative. `trace` holds what was computed."""

    code = "NEGATIVE_RESOURCE"

    def __init__(self, message: str, trace: Any):
        super().__init__(message)
        self.trace = trace


class ModelParseError(CHTWError):
    """Every syntax/reference problem found in a model text, each with a location."""

    code = "MODEL_PARSE_ERROR"

    def __init__(self, diagnostics: List["Diagnostic"]):
        first = diagnostics[0].message if diagnostics else "model could not be parsed"
        super().__init__(f"{len(diagnostics)} error(s) in model: {first}")
        self.diagnostics = diagnostics
