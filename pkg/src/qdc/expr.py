"""Text grammar for polynomials.

::

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := atom ["^" ["-"] int]
    atom   := scalar | gen | symbol | "(" expr ")"
    gen    := KIND "[" int "," int "]"     KIND in T L Om OmL OmT Im ImL
    scalar := q | p | x | lam | Nq | kq | int

Negative powers are only allowed on scalar-valued factors.  Composite
symbols (``XiX``, ``DetT``, ``TrOmL`` ...) are looked up in a table supplied
by the caller, usually a presentation's defined symbols.
"""

from __future__ import annotations

import re
from typing import Mapping, Optional

from .ncalg import KINDS, Polynomial, word_string
from .scalars import Scalar, field, to_string

__all__ = ["ParseError", "parse_expr", "format_poly", "format_scalar"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _tokenize(text: str):
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip()))
        num, name, sym = m.groups()
        if num is not None:
            out.append(("int", int(num), start))
        elif name is not None:
            out.append(("name", name, start))
        else:
            if sym not in "+-*^()[],":
                raise ParseError(f"unexpected character {sym!r}", start)
            out.append((sym, sym, start))
        pos = m.end(0)
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, N: int, symbols: Mapping[str, Polynomial]):
        self.toks = _tokenize(text)
        self.i = 0
        self.N = N
        self.F = field(N)
        self.symbols = symbols or {}
        self.scalars = {
            "q": self.F.q,
            "p": self.F.p,
            "x": self.F.x,
            "lam": self.F.lam,
            "Nq": self.F.nq,
            "kq": self.F.kq,
        }

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "integer" if kind == "int" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, got {got}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        out = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return out

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        out = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            out = out + t if op == "+" else out - t
        return out

    def term(self) -> Polynomial:
        out = self.factor()
        while self.peek()[0] == "*":
            self.take()
            out = out * self.factor()
        return out

    def factor(self) -> Polynomial:
        start = self.peek()[2]
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            k = self.take("int")[1]
            if neg:
                if base.degree() > 0:
                    raise ParseError("negative power of a non-scalar", start)
                c = base.terms.get((), None)
                if c is None:
                    raise ParseError("negative power of zero", start)
                return Polynomial.const(c ** (-k), self.N)
            return base**k
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return Polynomial.const(val, self.N)
        if kind == "(":
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "name":
            if val in KINDS:
                self.take("[")
                r = self.take("int")
                self.take(",")
                c = self.take("int")
                self.take("]")
                if not (1 <= r[1] <= self.N and 1 <= c[1] <= self.N):
                    raise ParseError(f"index [{r[1]},{c[1]}] outside 1..{self.N}", r[2])
                return Polynomial.gen(val, r[1], c[1], self.N)
            if val in self.scalars:
                return Polynomial.const(self.scalars[val], self.N)
            if val in self.symbols:
                sym = self.symbols[val]
                if not isinstance(sym, Polynomial):
                    raise ParseError(f"symbol {val!r} is a matrix, not a polynomial", pos)
                return sym
            raise ParseError(f"unknown name {val!r}", pos)
        got = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {got}", pos)


def parse_expr(text: str, N: int, symbols: Optional[Mapping[str, Polynomial]] = None) -> Polynomial:
    return _Parser(text, N, symbols).parse()


def format_scalar(c: Scalar) -> str:
    return to_string(c)


def format_poly(p: Polynomial) -> str:
    """Canonical string: terms in descending degree-lexicographic word order."""
    if not p.terms:
        return "0"
    parts = []
    for w, c in p.sorted_terms():
        ws = word_string(w) if w else ""
        s = to_string(c)
        if c.den.is_one() and s in ("1", "-1") and ws:
            part = ("-" if s == "-1" else "") + ws
        elif not ws:
            part = f"({s})"
        else:
            part = f"({s})*{ws}"
        parts.append(part)
    out = parts[0]
    for part in parts[1:]:
        out += " - " + part[1:] if part.startswith("-") else " + " + part
    return out
