"""
Parser for `.chtw` model files.

    space <id> { axis <name> min <r> max <r> cells <n>; ... }
    cbrane <id> on <space> { init <field>; }
    tbrane <id> on <space> { rate <field>; }
    hcarrier <id> <cbrane> -> <tbrane> { kind normal|blocking|associative; threshold <field>; }
    wcarrier <id> <tbrane> -> <cbrane> { mode pointwise|kernel; gain <field> | kernel <kernel>; }

Parsing runs in two passes: declarations are read into an outline (syntax
errors skip to the next declaration keyword), then references are resolved
and literals sampled on their grids. Every problem is collected with its
line and column; nothing is raised until the end.
"""

from __future__ import annotations

import typing as t
from dataclasses import dataclass, field
from pathlib import Path

from loguru import logger
from pydantic import BaseModel, ConfigDict

from ..errors import CHTWError, InvalidAxisError, ModelParseError
from ..models.diagnostics import Diagnostic, SourceLocation
from ..models.space import Axis, Grid, Space
from ..models.system import CarrierKind, CBrane, CHTWSystem, HCarrier, MarkFunction, TBrane, WCarrier, WMode
from ..services.grids import build_grid
from . import lexer
from .literals import (
    Box,
    Const,
    Csv,
    Literal,
    Rows,
    Schedule,
    Uniform,
    Values,
    sample_field,
    sample_kernel,
    to_scheduled,
)

_IGNORE = {lexer.TokenType.WHITESPACE, lexer.TokenType.COMMENT}
DECLARATIONS = ("space", "cbrane", "tbrane", "hcarrier", "wcarrier")
_KINDS = {kind.value: kind for kind in CarrierKind}
_MODES = {mode.value: mode for mode in WMode}

Expected = t.Union[lexer.TokenType, str, t.AbstractSet[str]]


class _SyntaxProblem(Exception):
    def __init__(self, message: str, token: t.Optional[lexer.Token], end: SourceLocation):
        super().__init__(message)
        self.message = message
        self.location = _loc(token) if token is not None else end


def _loc(token: lexer.Token) -> SourceLocation:
    return SourceLocation(line=token.line, column=token.column)


class TokenStream:
    def __init__(self, code: str) -> None:
        self.tokens = [tok for tok in lexer.lex(code) if tok.token_type not in _IGNORE]
        self.position = 0
        lines = code.split("\n")
        self.end = SourceLocation(line=len(lines), column=len(lines[-1]) + 1)

    @property
    def current(self) -> t.Optional[lexer.Token]:
        return self.tokens[self.position] if self.position < len(self.tokens) else None

    @property
    def finished(self) -> bool:
        return self.current is None

    def error(self, message: str) -> _SyntaxProblem:
        token = self.current
        found = f"`{token.text}`" if token is not None else "end of file"
        return _SyntaxProblem(f"{message}, found {found}", token, self.end)

    def accept(self, expected: Expected) -> t.Optional[lexer.Token]:
        token = self.current
        if token is None:
            return None
        if isinstance(expected, lexer.TokenType):
            matched = token.token_type is expected
        elif isinstance(expected, str):
            matched = token.text == expected and token.token_type is not lexer.TokenType.STRING
        else:
            matched = token.text in expected and token.token_type is lexer.TokenType.IDENTIFIER
        if not matched:
            return None
        self.position += 1
        return token

    def expect(self, expected: Expected, what: t.Optional[str] = None) -> lexer.Token:
        token = self.accept(expected)
        if token is None:
            if what is None:
                what = expected.value if isinstance(expected, lexer.TokenType) else f"`{expected}`"
                if isinstance(expected, (set, frozenset)):
                    what = " or ".join(sorted(expected))
            raise self.error(f"expected {what}")
        return token

    def identifier(self, what: str) -> lexer.Token:
        token = self.current
        if token is not None and token.token_type is lexer.TokenType.IDENTIFIER and token.text in DECLARATIONS:
            raise self.error(f"expected {what} (declaration keywords are reserved)")
        return self.expect(lexer.TokenType.IDENTIFIER, what)

    def number(self) -> float:
        return float(self.expect(lexer.TokenType.NUMBER, "number").text)

    def integer(self, what: str = "integer") -> int:
        token = self.expect(lexer.TokenType.NUMBER, what)
        try:
            return int(token.text)
        except ValueError:
            raise _SyntaxProblem(f"expected {what}, found `{token.text}`", token, self.end) from None

    def skip_declaration(self, start: int) -> None:
        """Resynchronize on the next declaration keyword after a syntax error."""
        if self.position == start and not self.finished:
            self.position += 1
        while not self.finished:
            token = self.current
            if token is not None and token.token_type is lexer.TokenType.IDENTIFIER and token.text in DECLARATIONS:
                return
            self.position += 1


@dataclass
class _Decl:
    keyword: str
    ident: lexer.Token
    refs: t.Dict[str, lexer.Token] = field(default_factory=dict)
    axes: t.List[t.Tuple[Axis, lexer.Token]] = field(default_factory=list)
    literals: t.Dict[str, t.Tuple[Literal, lexer.Token]] = field(default_factory=dict)
    options: t.Dict[str, lexer.Token] = field(default_factory=dict)


class ModelDocument(BaseModel):
    """A parsed model: its text, the system, and where each declaration sits."""

    model_config = ConfigDict(frozen=True)

    source: str
    system: CHTWSystem
    locations: t.Dict[str, SourceLocation]
    path: t.Optional[Path] = None


# ---------------------------------------------------------------- syntax pass


def _parse_field(stream: TokenStream, allow_schedule: bool = True) -> Literal:
    token = stream.expect({"const", "values", "box", "csv", "schedule"}, "field literal")
    loc = _loc(token)
    if token.text == "const":
        return Const(stream.number(), loc)
    if token.text == "values":
        return Values(_parse_numbers(stream), loc)
    if token.text == "csv":
        return Csv(stream.expect(lexer.TokenType.STRING, "quoted path").value, loc)
    if token.text == "box":
        stream.expect("[")
        low = stream.number()
        stream.expect(",")
        high = stream.number()
        stream.expect("]")
        stream.expect("axis")
        axis = stream.expect(lexer.TokenType.IDENTIFIER, "axis name").text
        stream.expect("inside")
        inside = stream.number()
        stream.expect("outside")
        return Box(low, high, axis, inside, stream.number(), loc)
    if not allow_schedule:
        raise _SyntaxProblem("schedules cannot be nested", token, stream.end)
    return _parse_schedule(stream, token, lambda: _parse_field(stream, allow_schedule=False))


def _parse_kernel(stream: TokenStream, allow_schedule: bool = True) -> Literal:
    token = stream.expect({"uniform", "values", "csv", "schedule"}, "kernel literal")
    loc = _loc(token)
    if token.text == "uniform":
        return Uniform(stream.number(), loc)
    if token.text == "csv":
        return Csv(stream.expect(lexer.TokenType.STRING, "quoted path").value, loc)
    if token.text == "values":
        stream.expect("[")
        rows = [_parse_numbers(stream)]
        while stream.accept(","):
            rows.append(_parse_numbers(stream))
        stream.expect("]")
        return Rows(tuple(rows), loc)
    if not allow_schedule:
        raise _SyntaxProblem("schedules cannot be nested", token, stream.end)
    return _parse_schedule(stream, token, lambda: _parse_kernel(stream, allow_schedule=False))


def _parse_numbers(stream: TokenStream) -> t.Tuple[float, ...]:
    stream.expect("[")
    numbers = [stream.number()]
    while stream.accept(","):
        numbers.append(stream.number())
    stream.expect("]")
    return tuple(numbers)


def _parse_schedule(stream: TokenStream, token: lexer.Token, entry: t.Callable[[], Literal]) -> Schedule:
    stream.expect("{")
    entries: t.List[t.Tuple[int, Literal]] = []
    while not stream.accept("}"):
        step_token = stream.current
        k = stream.integer("step number")
        expected_after = entries[-1][0] if entries else None
        if (expected_after is None and k != 0) or (expected_after is not None and k <= expected_after):
            raise _SyntaxProblem(
                "schedule steps must start at 0 and strictly increase", step_token, stream.end
            )
        stream.expect(":")
        entries.append((k, entry()))
        if not stream.accept(","):
            stream.expect("}")
            break
    if not entries:
        raise _SyntaxProblem("empty schedule", token, stream.end)
    return Schedule(tuple(entries), _loc(token))


def _parse_statements(stream: TokenStream, decl: _Decl, grammar: t.Dict[str, t.Callable[[], t.Any]]) -> None:
    stream.expect("{")
    while not stream.accept("}"):
        keyword = stream.expect(set(grammar), " or ".join(f"`{k}`" for k in grammar))
        if keyword.text in decl.literals or keyword.text in decl.options:
            raise _SyntaxProblem(f"`{keyword.text}` given twice", keyword, stream.end)
        value = grammar[keyword.text]()
        if isinstance(value, lexer.Token):
            decl.options[keyword.text] = value
        else:
            decl.literals[keyword.text] = (value, keyword)
        stream.expect(";")


def _parse_declaration(stream: TokenStream) -> _Decl:
    keyword = stream.expect(set(DECLARATIONS), "declaration (" + ", ".join(DECLARATIONS) + ")")
    decl = _Decl(keyword.text, stream.identifier(f"{keyword.text} id"))

    if keyword.text == "space":
        stream.expect("{")
        while not stream.accept("}"):
            stream.expect("axis")
            name = stream.expect(lexer.TokenType.IDENTIFIER, "axis name")
            stream.expect("min")
            lo = stream.number()
            stream.expect("max")
            hi = stream.number()
            stream.expect("cells")
            cells = stream.integer("cell count")
            stream.expect(";")
            decl.axes.append((Axis(name=name.text, min=lo, max=hi, cells=cells), name))
        return decl

    if keyword.text in ("cbrane", "tbrane"):
        stream.expect("on")
        decl.refs["space"] = stream.identifier("space id")
        statement = "init" if keyword.text == "cbrane" else "rate"
        _parse_statements(stream, decl, {statement: lambda: _parse_field(stream)})
        return decl

    decl.refs["source"] = stream.identifier("source brane id")
    stream.expect(lexer.TokenType.ARROW, "`->`")
    decl.refs["target"] = stream.identifier("target brane id")
    if keyword.text == "hcarrier":
        grammar: t.Dict[str, t.Callable[[], t.Any]] = {
            "kind": lambda: stream.expect(set(_KINDS), "carrier kind"),
            "threshold": lambda: _parse_field(stream),
        }
    else:
        grammar = {
            "mode": lambda: stream.expect(set(_MODES), "carrier mode"),
            "gain": lambda: _parse_field(stream),
            "kernel": lambda: _parse_kernel(stream),
        }
    _parse_statements(stream, decl, grammar)
    return decl


# ------------------------------------------------------------- resolve pass


class _Resolver:
    def __init__(self, decls: t.List[_Decl], base_dir: t.Optional[Path], problems: t.List[Diagnostic]):
        self.decls = decls
        self.base_dir = base_dir
        self.problems = problems
        self.spaces: t.Dict[str, Space] = {}
        self.grids: t.Dict[str, Grid] = {}
        self.brane_spaces: t.Dict[str, t.Tuple[str, str]] = {}  # id -> (keyword, space id)
        self.locations: t.Dict[str, SourceLocation] = {}
        self.declared: t.Dict[str, t.Tuple[str, SourceLocation]] = {}
        self.claimed_branes: t.Set[int] = set()

    def report(self, code: str, message: str, location: SourceLocation) -> None:
        self.problems.append(Diagnostic(code=code, message=message, location=location))

    def claim(self, namespace: str, decl: _Decl) -> bool:
        """Ids are unique across every declaration, whatever its keyword."""
        name = decl.ident.text
        if name in self.declared:
            keyword, first = self.declared[name]
            self.report(
                "DUPLICATE_ID",
                f"id `{name}` already declared by {keyword} at {first.line}:{first.column}",
                _loc(decl.ident),
            )
            return False
        self.declared[name] = (decl.keyword, _loc(decl.ident))
        self.locations[f"{namespace} {name}"] = _loc(decl.ident)
        return True

    def sampled(self, decl: _Decl, name: str, sample: t.Callable[[Literal], t.Any]) -> t.Any:
        if name not in decl.literals:
            self.report("SYNTAX_ERROR", f"{decl.keyword} `{decl.ident.text}` needs `{name}`", _loc(decl.ident))
            return None
        literal, _ = decl.literals[name]
        try:
            return to_scheduled(literal, sample)
        except CHTWError as e:
            self.report(e.code, e.message, e.location or _loc(decl.ident))
            return None

    def resolve(self) -> CHTWSystem:
        spaces, cbranes, tbranes, hcarriers, wcarriers = [], [], [], [], []

        for decl in self.decls:
            if decl.keyword != "space" or not self.claim("space", decl):
                continue
            space = Space(id=decl.ident.text, axes=tuple(axis for axis, _ in decl.axes))
            self.spaces[space.id] = space
            spaces.append(space)
            try:
                self.grids[space.id] = build_grid(space)
            except InvalidAxisError as e:
                self.report(e.code, e.message, _loc(decl.ident))

        for decl in self.decls:
            if decl.keyword in ("cbrane", "tbrane") and self.claim("brane", decl):
                space_token = decl.refs["space"]
                if space_token.text not in self.spaces:
                    self.report("UNKNOWN_REFERENCE", f"unknown space `{space_token.text}`", _loc(space_token))
                    continue
                self.brane_spaces[decl.ident.text] = (decl.keyword, space_token.text)
                self.claimed_branes.add(id(decl))

        for decl in self.decls:
            if decl.keyword == "cbrane" and id(decl) in self.claimed_branes:
                brane = self._cbrane(decl)
                if brane is not None:
                    cbranes.append(brane)
            elif decl.keyword == "tbrane" and id(decl) in self.claimed_branes:
                tbrane = self._tbrane(decl)
                if tbrane is not None:
                    tbranes.append(tbrane)
            elif decl.keyword == "hcarrier" and self.claim("carrier", decl):
                hcarrier = self._hcarrier(decl)
                if hcarrier is not None:
                    hcarriers.append(hcarrier)
            elif decl.keyword == "wcarrier" and self.claim("carrier", decl):
                wcarrier = self._wcarrier(decl)
                if wcarrier is not None:
                    wcarriers.append(wcarrier)

        return CHTWSystem(
            spaces=tuple(spaces),
            cbranes=tuple(cbranes),
            tbranes=tuple(tbranes),
            hcarriers=tuple(hcarriers),
            wcarriers=tuple(wcarriers),
        )

    def _grid(self, brane: str) -> t.Optional[Grid]:
        return self.grids.get(self.brane_spaces[brane][1])

    def _cbrane(self, decl: _Decl) -> t.Optional[CBrane]:
        ident = decl.ident.text
        grid = self._grid(ident)
        if grid is None:
            return None
        if "init" in decl.literals and isinstance(decl.literals["init"][0], Schedule):
            self.report("SYNTAX_ERROR", "an initial mark cannot be a schedule", _loc(decl.literals["init"][1]))
            return None
        init = self.sampled(decl, "init", lambda lit: sample_field(lit, grid, self.base_dir))
        if init is None:
            return None
        space = self.brane_spaces[ident][1]
        return CBrane(id=ident, space=space, initial=MarkFunction(brane=ident, values=init.at(0)))

    def _tbrane(self, decl: _Decl) -> t.Optional[TBrane]:
        ident = decl.ident.text
        grid = self._grid(ident)
        if grid is None:
            return None
        rate = self.sampled(decl, "rate", lambda lit: sample_field(lit, grid, self.base_dir))
        return None if rate is None else TBrane(id=ident, space=self.brane_spaces[ident][1], rate=rate)

    def _endpoint(self, token: lexer.Token, wanted: str) -> bool:
        kind = self.brane_spaces.get(token.text, (None,))[0]
        if kind == wanted:
            return True
        if kind is None:
            self.report("UNKNOWN_REFERENCE", f"unknown {wanted} `{token.text}`", _loc(token))
        else:
            self.report("UNKNOWN_REFERENCE", f"`{token.text}` is a {kind}, expected a {wanted}", _loc(token))
        return False

    def _hcarrier(self, decl: _Decl) -> t.Optional[HCarrier]:
        source, target = decl.refs["source"], decl.refs["target"]
        ok_source = self._endpoint(source, "cbrane")
        if not (self._endpoint(target, "tbrane") and ok_source):
            return None
        grid = self._grid(source.text)
        if grid is None:
            return None
        threshold = self.sampled(decl, "threshold", lambda lit: sample_field(lit, grid, self.base_dir))
        if threshold is None:
            return None
        kind_token = decl.options.get("kind")
        return HCarrier(
            id=decl.ident.text,
            kind=_KINDS[kind_token.text] if kind_token else CarrierKind.NORMAL,
            source=source.text,
            target=target.text,
            threshold=threshold,
        )

    def _wcarrier(self, decl: _Decl) -> t.Optional[WCarrier]:
        source, target = decl.refs["source"], decl.refs["target"]
        ok_source = self._endpoint(source, "tbrane")
        if not (self._endpoint(target, "cbrane") and ok_source):
            return None
        mode_token = decl.options.get("mode")
        mode = _MODES[mode_token.text] if mode_token else WMode.POINTWISE
        wrong = "kernel" if mode == WMode.POINTWISE else "gain"
        if wrong in decl.literals:
            self.report("SYNTAX_ERROR", f"`{wrong}` does not apply to {mode.value} mode", _loc(decl.literals[wrong][1]))
            return None
        source_grid, target_grid = self._grid(source.text), self._grid(target.text)
        if source_grid is None or target_grid is None:
            return None
        if mode == WMode.POINTWISE:
            gain = self.sampled(decl, "gain", lambda lit: sample_field(lit, source_grid, self.base_dir))
            if gain is None:
                return None
            return WCarrier(id=decl.ident.text, source=source.text, target=target.text, mode=mode, gain=gain)
        kernel = self.sampled(decl, "kernel", lambda lit: sample_kernel(lit, source_grid, target_grid, self.base_dir))
        if kernel is None:
            return None
        return WCarrier(id=decl.ident.text, source=source.text, target=target.text, mode=mode, kernel=kernel)


# ------------------------------------------------------------------ entry points


def parse_document(text: str, base_dir: t.Optional[Path] = None, path: t.Optional[Path] = None) -> ModelDocument:
    problems: t.List[Diagnostic] = []
    for token in lexer.lex(text):
        if token.token_type is lexer.TokenType.ERROR:
            problems.append(
                Diagnostic(code="SYNTAX_ERROR", message=f"unexpected character `{token.text}`", location=_loc(token))
            )

    stream = TokenStream(text)
    stream.tokens = [tok for tok in stream.tokens if tok.token_type is not lexer.TokenType.ERROR]
    decls: t.List[_Decl] = []
    while not stream.finished:
        start = stream.position
        try:
            decls.append(_parse_declaration(stream))
        except _SyntaxProblem as problem:
            problems.append(Diagnostic(code="SYNTAX_ERROR", message=problem.message, location=problem.location))
            stream.skip_declaration(start)

    resolver = _Resolver(decls, base_dir, problems)
    system = resolver.resolve()
    if problems:
        problems.sort(key=lambda d: (d.location.line or 0, d.location.column or 0) if d.location else (0, 0))
        logger.debug("Model has {} problem(s)", len(problems))
        raise ModelParseError(problems)
    return ModelDocument(source=text, system=system, locations=resolver.locations, path=path)


def parse(text: str, base_dir: t.Optional[Path] = None) -> CHTWSystem:
    """Parse model text; raise ModelParseError listing every located problem."""
    return parse_document(text, base_dir).system


def parse_file(path: Path | str) -> ModelDocument:
    """Read a UTF-8 model file; `csv` paths resolve against its directory."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_document(text, base_dir=path.parent, path=path)
