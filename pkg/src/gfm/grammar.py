"""Fragment expression language.

    expr     := segment ("/" segment)*
    segment  := NAME "[" [binding ("," binding)*] "]"
    binding  := NAME "=" value
    value    := INTEGER | DECIMAL | STRING | COLOR | expr
    NAME     := [a-z][a-z0-9_]*
    INTEGER  := 0 | [1-9][0-9]*
    DECIMAL  := INTEGER "." [0-9]+
    STRING   := "'" ( [^'\\] | "\\'" | "\\\\" )* "'"
    COLOR    := "#" [0-9a-fA-F]{6}

Whitespace may surround any punctuation.  ``/`` chains re-index the fragment
produced so far; an expression used as a binding value is a nested anchor.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Union

from .errors import ExpressionSyntaxError

NAME_START = "abcdefghijklmnopqrstuvwxyz"
NAME_CHARS = NAME_START + "0123456789_"
DIGITS = "0123456789"
HEX = "0123456789abcdefABCDEF"
SPACE = " \t\r\n"


@dataclass(frozen=True)
class Color:
    hex: str  # six lowercase hex digits

    def __post_init__(self):
        h = self.hex.lower().lstrip("#")
        if len(h) != 6 or any(c not in HEX for c in h):
            raise ValueError(f"bad color literal {self.hex!r}")
        object.__setattr__(self, "hex", h)

    @property
    def rgb(self) -> tuple[int, int, int]:
        return tuple(int(self.hex[i:i + 2], 16) for i in (0, 2, 4))

    def __str__(self) -> str:
        return "#" + self.hex


Value = Union[int, Decimal, str, Color, "FragmentExpression"]


@dataclass(frozen=True)
class Segment:
    indexer: str
    bindings: tuple[tuple[str, Value], ...] = ()

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.bindings)


@dataclass(frozen=True)
class FragmentExpression:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("an expression needs at least one segment")

    def __str__(self) -> str:
        return print_expression(self)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self, pos: int | None = None) -> int:
        return len(self.text[:self.pos if pos is None else pos].encode("utf-8"))

    def fail(self, message: str, expected: str = "", pos: int | None = None):
        raise ExpressionSyntaxError(message, self.offset(pos), expected)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos] in SPACE:
            self.pos += 1

    def expect(self, char: str):
        self.skip_space()
        if self.peek() != char:
            found = repr(self.peek()) if self.peek() else "end of input"
            self.fail(f"unexpected {found}", repr(char))
        self.pos += 1

    def name(self) -> str:
        self.skip_space()
        start = self.pos
        if self.peek() == "" or self.peek() not in NAME_START:
            found = repr(self.peek()) if self.peek() else "end of input"
            self.fail(f"unexpected {found}", "a name [a-z][a-z0-9_]*")
        while self.peek() and self.peek() in NAME_CHARS:
            self.pos += 1
        return self.text[start:self.pos]

    def expr(self) -> FragmentExpression:
        segments = [self.segment()]
        while True:
            self.skip_space()
            if self.peek() != "/":
                break
            self.pos += 1
            segments.append(self.segment())
        return FragmentExpression(tuple(segments))

    def segment(self) -> Segment:
        indexer = self.name()
        self.expect("[")
        bindings = []
        self.skip_space()
        if self.peek() == "]":
            self.pos += 1
            return Segment(indexer, ())
        while True:
            key = self.name()
            self.expect("=")
            bindings.append((key, self.value()))
            self.skip_space()
            c = self.peek()
            if c == ",":
                self.pos += 1
            elif c == "]":
                self.pos += 1
                return Segment(indexer, tuple(bindings))
            else:
                found = repr(c) if c else "end of input"
                self.fail(f"unexpected {found}", "',' or ']'")

    def value(self) -> Value:
        self.skip_space()
        c = self.peek()
        if c == "'":
            return self.string()
        if c == "#":
            return self.color()
        if c and c in DIGITS:
            return self.number()
        if c and c in NAME_START:
            return self.expr()
        found = repr(c) if c else "end of input"
        self.fail(f"unexpected {found}", "a number, string, color or expression")

    def number(self) -> Value:
        start = self.pos
        if self.peek() == "0":
            self.pos += 1
            if self.peek() and self.peek() in DIGITS:
                self.fail("leading zero in number", "'.' or end of number")
        else:
            while self.peek() and self.peek() in DIGITS:
                self.pos += 1
        if self.peek() == ".":
            self.pos += 1
            frac = self.pos
            while self.peek() and self.peek() in DIGITS:
                self.pos += 1
            if self.pos == frac:
                self.fail("missing digits after decimal point", "a digit")
            return Decimal(self.text[start:self.pos])
        return int(self.text[start:self.pos])

    def string(self) -> str:
        start = self.pos
        self.pos += 1
        out = []
        while True:
            c = self.peek()
            if c == "":
                self.fail("unterminated string", "\"'\"", start)
            if c == "'":
                self.pos += 1
                return "".join(out)
            if c == "\\":
                nxt = self.text[self.pos + 1:self.pos + 2]
                if nxt not in ("'", "\\"):
                    self.fail("bad escape in string", "\\' or \\\\")
                out.append(nxt)
                self.pos += 2
                continue
            out.append(c)
            self.pos += 1

    def color(self) -> Color:
        start = self.pos
        self.pos += 1
        digits = self.text[self.pos:self.pos + 6]
        if len(digits) < 6 or any(c not in HEX for c in digits):
            self.fail("bad color literal", "six hex digits after '#'", start)
        self.pos += 6
        if self.peek() and self.peek() in HEX:
            self.fail("bad color literal", "exactly six hex digits")
        return Color(digits)


def parse_expression(text: str) -> FragmentExpression:
    parser = _Parser(text)
    expr = parser.expr()
    parser.skip_space()
    if parser.pos != len(text):
        parser.fail(f"unexpected {parser.peek()!r}", "'/' or end of input")
    return expr


def _print_value(value: Value) -> str:
    if isinstance(value, FragmentExpression):
        return print_expression(value)
    if isinstance(value, Color):
        return str(value)
    if isinstance(value, bool):
        raise TypeError("booleans are not expression values")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Decimal):
        text = format(value, "f")
        if "." not in text:
            text += ".0"
        return text
    if isinstance(value, str):
        return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"
    raise TypeError(f"cannot print value {value!r}")


def print_segment(segment: Segment) -> str:
    inner = ",".join(f"{name}={_print_value(v)}" for name, v in segment.bindings)
    return f"{segment.indexer}[{inner}]"


def print_expression(expr: FragmentExpression) -> str:
    return "/".join(print_segment(s) for s in expr.segments)
