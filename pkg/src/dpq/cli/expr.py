"""
Graded expression parser.

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' nat)?
    atom     := rational | ident | 'd(' ident ')' | 'p[' ident ']' | '(' expr ')'
    rational := int ('/' nat)?

Modes: "function" (no derivative symbols), "polyvector" (d(x) and p[x] are the
momentum p_x), "operator" (d(x) is ∂_x and '*' is composition; the reserved
identifier h stands for ℏ unless a coordinate is called h).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..graded import GradedError, GradedPoly, Ring
from ..hbar import HbarOp, hbar_compose
from ..operators import HalfDensityOp

MODES = ("function", "polyvector", "operator")

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\]]))")


class ParseError(GradedError):
    def __init__(self, msg, text, pos, expected=()):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        exp = f"; expected one of {sorted(expected)}" if expected else ""
        super().__init__(f"{msg} at line {line}, column {col}{exp}")
        self.line, self.col, self.expected = line, col, set(expected)


@dataclass
class Tok:
    kind: str
    value: str
    pos: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            p = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[p]!r}", text, p)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, ring: Ring, mode: str, macros: dict, stack=()):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode}")
        self.text = text
        self.ring = ring
        self.mode = mode
        self.macros = macros
        self.stack = stack
        self.toks = tokenize(text)
        self.i = 0

    # --- value algebra per mode
    def _const(self, c):
        if self.mode == "operator":
            return HbarOp(self.ring, {0: self.ring.const(c)})
        return self.ring.const(c)

    def _wrap(self, p: GradedPoly):
        if self.mode == "operator":
            return HbarOp(self.ring, {0: HalfDensityOp(p)})
        return p

    def _mul(self, a, b):
        if self.mode == "operator":
            return hbar_compose(a, b)
        return a * b

    def _neg(self, a):
        return -a

    # --- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def _err(self, msg, expected=()):
        raise ParseError(msg, self.text, self.tok.pos, expected)

    def _eat(self, kind, value=None):
        t = self.tok
        if t.kind != kind or (value is not None and t.value != value):
            self._err(f"unexpected {t.value or 'end of input'!r}", {value or kind})
        self.i += 1
        return t

    def _peek_op(self, value):
        return self.tok.kind == "op" and self.tok.value == value

    # --- grammar
    def parse(self):
        v = self.expr()
        if self.tok.kind != "end":
            self._err(f"unexpected {self.tok.value!r}", {"+", "-", "*", "^", "end"})
        return v

    def expr(self):
        sign = 1
        if self._peek_op("-") or self._peek_op("+"):
            sign = -1 if self.tok.value == "-" else 1
            self.i += 1
        v = self.term()
        if sign < 0:
            v = self._neg(v)
        while self._peek_op("+") or self._peek_op("-"):
            op = self.tok.value
            self.i += 1
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def term(self):
        v = self.factor()
        while self._peek_op("*"):
            self.i += 1
            v = self._mul(v, self.factor())
        return v

    def factor(self):
        start = self.tok.pos
        v, odd = self.atom()
        if self._peek_op("^"):
            self.i += 1
            n = int(self._eat("int").value)
            if odd and n > 1:
                raise ParseError("odd symbol raised to a power > 1", self.text, start)
            out = self._const(1)
            for _ in range(n):
                out = self._mul(out, v)
            v = out
        return v

    def _coord(self, name_tok):
        try:
            return self.ring.coord_index(name_tok.value)
        except GradedError:
            raise ParseError(f"unknown identifier {name_tok.value!r}", self.text, name_tok.pos) from None

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            num = int(t.value)
            if self._peek_op("/"):
                self.i += 1
                den = int(self._eat("int").value)
                if den == 0:
                    raise ParseError("zero denominator", self.text, t.pos)
                return self._const(Fraction(num, den)), False
            return self._const(num), False
        if t.kind == "op" and t.value == "(":
            self.i += 1
            v = self.expr()
            self._eat("op", ")")
            return v, False
        if t.kind == "ident":
            nxt = self.toks[self.i + 1]
            # no juxtaposition in the grammar, so "d(" and "p[" are unambiguous even
            # when a coordinate is itself called d or p
            is_d = t.value == "d" and nxt.kind == "op" and nxt.value == "("
            is_p = t.value == "p" and nxt.kind == "op" and nxt.value == "["
            if is_d or is_p:
                if self.mode == "function":
                    raise ParseError("derivative symbols are not allowed in function mode", self.text, t.pos)
                if is_p and self.mode == "operator":
                    raise ParseError("p[...] is a polyvector symbol; use d(...) in operator mode",
                                     self.text, t.pos)
                self.i += 2
                name = self._eat("ident")
                a = self._coord(name)
                self._eat("op", ")" if is_d else "]")
                g = self.ring._gen(self.ring.n + a)
                return self._wrap(g), bool(self.ring.parities[a])
            self.i += 1
            if t.value in self.ring.index:
                a = self.ring.index[t.value]
                return self._wrap(self.ring._gen(a)), bool(self.ring.parities[a])
            if t.value in self.macros:
                if t.value in self.stack:
                    raise ParseError(f"recursive definition of {t.value!r}", self.text, t.pos)
                sub = _Parser(self.macros[t.value], self.ring, self.mode, self.macros,
                              self.stack + (t.value,))
                v = sub.parse()
                odd = _is_odd(v)
                return v, odd
            if t.value == "h" and self.mode == "operator":
                return HbarOp(self.ring, {1: self.ring.one()}), False
            raise ParseError(f"unknown identifier {t.value!r}", self.text, t.pos)
        self._err(f"unexpected {t.value or 'end of input'!r}",
                  {"number", "identifier", "d(", "("})


def _is_odd(v):
    if isinstance(v, HbarOp):
        ds = v.degrees()
    else:
        ds = v.degrees()
    return len(ds) == 1 and next(iter(ds)) % 2 == 1


def parse_expr(text: str, ring: Ring, mode: str = "polyvector", macros: dict | None = None):
    """Parse text into a GradedPoly (function/polyvector) or, in operator
    mode, a HalfDensityOp (or an HbarOp when h appears)."""
    v = _Parser(text, ring, mode, macros or {}).parse()
    if mode == "function" and not v.is_function():
        raise ParseError("expected a function", text, 0)
    if mode == "operator":
        if set(v.coeffs) <= {0}:
            return v[0]
        return v
    return v
