from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator


class TokenType(Enum):
    WHITESPACE = "whitespace"
    COMMENT = "comment"
    NUMBER = "number"
    STRING = "string"
    IDENTIFIER = "identifier"
    ARROW = "arrow"
    DELIMITER = "delimiter"
    ERROR = "error"


@dataclass(frozen=True)
class Token:
    token_type: TokenType
    text: str
    line: int
    column: int

    @property
    def value(self) -> str:
        if self.token_type is TokenType.STRING:
            return re.sub(r'\\(["\\])', r"\1", self.text[1:-1])
        return self.text


_PATTERNS = [
    (TokenType.WHITESPACE, r"\s+"),
    (TokenType.COMMENT, r"#[^\n]*"),
    (TokenType.ARROW, r"->"),
    (TokenType.NUMBER, r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"),
    (TokenType.STRING, r'"(?:[^"\\\n]|\\.)*"'),
    (TokenType.IDENTIFIER, r"[A-Za-z_][A-Za-z0-9_]*"),
    (TokenType.DELIMITER, r"[{}\[\],;:]"),
    (TokenType.ERROR, r"."),
]

_LEXER = re.compile("|".join(f"(?P<{t.name}>{pattern})" for t, pattern in _PATTERNS))


def lex(code: str) -> Iterator[Token]:
    """Yield every token, whitespace and comments included, with 1-based line/column."""
    line = 1
    line_start = 0
    for match in _LEXER.finditer(code):
        kind = TokenType[match.lastgroup]  # type: ignore[index]
        text = match.group()
        yield Token(kind, text, line, match.start() - line_start + 1)
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = match.start() + text.rindex("\n") + 1
