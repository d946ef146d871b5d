"""Text grammar for weights.

::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' number))*
    factor := number | 'i' | var | '(' expr ')'   followed by optional '^' int
    number := int | int '/' int | decimal
    var    := 'z' | 'w'

``z`` is the holomorphic variable and ``w`` the placeholder for its conjugate.
Decimals are read exactly by their literal denominator (``0.25 -> 1/4``).
Whitespace is ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, NamedTuple

from .bipoly import BiPoly
from .gaussian import GaussianRational

MAX_EXPONENT = 512


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


class _Tok(NamedTuple):
    kind: str
    value: str
    pos: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise ParseError(msg, tok.pos, self.text)

    def accept(self, op: str) -> bool:
        if self.cur.kind == "op" and self.cur.value == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            self.error(f"expected {op!r}")

    def parse(self) -> BiPoly:
        if self.cur.kind == "end":
            self.error("empty expression")
        out = self.expr()
        if self.cur.kind != "end":
            self.error(f"unexpected token {self.cur.value!r}")
        return out

    def expr(self) -> BiPoly:
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        out = self.term() * sign
        while True:
            if self.accept("+"):
                out = out + self.term()
            elif self.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> BiPoly:
        out = self.factor()
        while True:
            if self.accept("*"):
                out = out * self.factor()
            elif self.cur.kind == "op" and self.cur.value == "/":
                tok = self.cur
                self.i += 1
                if self.cur.kind != "num":
                    self.error("division is only allowed by a number literal", tok)
                d = self.number()
                if d == 0:
                    self.error("division by zero", tok)
                out = out / d
            else:
                return out

    def number(self) -> Fraction:
        tok = self.cur
        self.i += 1
        return Fraction(tok.value)

    def factor(self) -> BiPoly:
        tok = self.cur
        if tok.kind == "num":
            base = BiPoly.const(self.number())
        elif tok.kind == "name":
            self.i += 1
            if tok.value == "z":
                base = BiPoly.z()
            elif tok.value == "w":
                base = BiPoly.w()
            elif tok.value == "i":
                base = BiPoly.const(GaussianRational(0, 1))
            else:
                self.error(f"unknown symbol {tok.value!r}", tok)
        elif self.accept("("):
            base = self.expr()
            self.expect(")")
        else:
            self.error("expected a number, 'z', 'w', 'i' or '('")
        if self.accept("^"):
            etok = self.cur
            if etok.kind != "num" or not etok.value.isdigit():
                self.error("exponent must be a nonnegative integer", etok)
            self.i += 1
            n = int(etok.value)
            if n > MAX_EXPONENT:
                self.error(f"exponent overflow (limit {MAX_EXPONENT})", etok)
            base = base ** n
        return base


def parse_poly(text: str) -> BiPoly:
    """Parse a weight expression into an exact :class:`BiPoly`."""
    return _Parser(text).parse()
