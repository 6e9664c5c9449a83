"""Tokenizer shared by the Turtle and SPARQL parsers."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from .errors import ParseError

_PN_PREFIX = r"(?:[^\W\d_](?:[\w.\-]*[\w\-])?)?"
_PN_LOCAL = r"(?:[\w\-](?:[\w.\-]*[\w\-])?)?"

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("COMMENT", r"#[^\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("LONGSTRING", r'"""|\'\'\''),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"'),
    ("SQSTRING", r"'(?:[^'\\\n\r]|\\.)*'"),
    ("BNODE", r"_:[\w](?:[\w.\-]*[\w\-])?"),
    ("PNAME", _PN_PREFIX + ":" + _PN_LOCAL),
    ("VAR", r"[?$][A-Za-z_]\w*"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DOUBLE", r"[+\-]?(?:\d+\.\d*|\.\d+|\d+)[eE][+\-]?\d+"),
    ("DECIMAL", r"[+\-]?\d*\.\d+"),
    ("INTEGER", r"[+\-]?\d+"),
    ("OP", r"\^\^|&&|\|\||!=|<=|>=|[=<>!.;,{}()\[\]*/|^+?]"),
    ("NAME", r"[A-Za-z_][\w\-]*"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def is_op(self, text: str) -> bool:
        return self.kind == "OP" and self.text == text

    def is_keyword(self, word: str) -> bool:
        return self.kind == "NAME" and self.text.upper() == word


def tokenize(text: str) -> list[Token]:
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def position(offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(line_starts, offset)
        return line, offset - line_starts[line - 1] + 1

    tokens = []
    pos = 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        if m is None:
            line, col = position(pos)
            raise ParseError(line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            line, col = position(pos)
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    line, col = position(len(text))
    tokens.append(Token("EOF", "", line, col))
    return tokens


_UNESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_SIMPLE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def unescape_string(tok: Token) -> str:
    body = tok.text[1:-1]

    def repl(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        ch = m.group(3)
        if ch not in _SIMPLE:
            raise ParseError(tok.line, tok.column, f"invalid escape \\{ch}")
        return _SIMPLE[ch]

    return _UNESCAPE.sub(repl, body)


class TokenStream:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def lookahead(self, n: int = 1) -> Token:
        return self.tokens[min(self.i + n, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek
        return ParseError(tok.line, tok.column, message)

    def expect_op(self, text: str) -> Token:
        tok = self.peek
        if not tok.is_op(text):
            found = "end of input" if tok.kind == "EOF" else repr(tok.text)
            raise self.error(f"expected '{text}', found {found}")
        return self.next()
