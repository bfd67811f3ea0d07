"""Parser for the textual field grammar.

::

    expr   := term (' + ' term)*
    term   := coeff ' * ' factor | coeff | factor      a bare coeff means coeff * Id
    coeff  := scalar ['z^' INT]          scalar is a rational or '{...}_M'
    factor := NAME '(e^' INT ' z)' | 'D^' INT '[' expr ']' | ':' expr expr ':'
            | '(' expr ')' | 'Id' | '<' NAME '>'

``<NAME>`` refers to a named field supplied by the caller.
"""

from __future__ import annotations

import re
from typing import Callable, Mapping, Optional

from gmpy2 import mpq

from ..scalars import as_scalar, parse_scalar
from .expr import Deriv, Gen, Ident, Linear, NormalProd, canonicalize
from .field import Field
from .system import GeneratorSystem

__all__ = ["ParseError", "parse_expr", "parse_field"]


class ParseError(ValueError):
    pass


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"-?\d+")
_RATIONAL = re.compile(r"-?\d+(?:/\d+)?")


class _Parser:
    def __init__(self, text: str, refs: Optional[Callable] = None):
        self.text = text
        self.pos = 0
        self.refs = refs

    def fail(self, msg):
        raise ParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def eat(self, s: str):
        if not self.peek(s):
            self.fail(f"expected {s!r}")
        self.pos += len(s)

    def regex(self, pat):
        self.ws()
        m = pat.match(self.text, self.pos)
        if not m:
            self.fail(f"expected {pat.pattern}")
        self.pos = m.end()
        return m.group(0)

    def done(self):
        self.ws()
        return self.pos >= len(self.text)

    # grammar ------------------------------------------------------------------

    def expr(self):
        terms = [self.term()]
        while self.peek("+"):
            self.eat("+")
            terms.append(self.term())
        if len(terms) == 1 and terms[0][0] is None:
            return terms[0][2]
        return Linear(tuple((as_scalar(1) if c is None else c, l, t) for c, l, t in terms))

    def term(self):
        self.ws()
        ch = self.text[self.pos:self.pos + 1]
        if ch == "{" or ch == "-" or ch.isdigit():
            c = self.scalar()
            l = 0
            if self.peek("z^"):
                self.eat("z^")
                l = int(self.regex(_INT))
            if not self.peek("*"):
                return (c, l, Ident())
            self.eat("*")
            return (c, l, self.factor())
        return (None, 0, self.factor())

    def scalar(self):
        if self.peek("{"):
            self.eat("{")
            end = self.text.find("}", self.pos)
            if end < 0:
                self.fail("unterminated scalar literal")
            body = self.text[self.pos:end]
            self.pos = end + 1
            self.eat("_")
            order = int(self.regex(_INT))
            try:
                return parse_scalar(body, order)
            except ValueError as exc:
                self.fail(str(exc))
        lit = self.regex(_RATIONAL)
        num, _, den = lit.partition("/")
        return as_scalar(mpq(int(num), int(den or 1)))

    def factor(self):
        self.ws()
        if self.peek(":"):
            self.eat(":")
            left = self.expr()
            right = self.expr()
            self.eat(":")
            return NormalProd(left, right)
        if self.peek("("):
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return inner
        if self.peek("<"):
            self.eat("<")
            name = self.regex(_NAME)
            self.eat(">")
            if self.refs is None:
                self.fail(f"no field named {name!r} is available")
            return self.refs(name)
        if self.peek("D^"):
            self.eat("D^")
            k = int(self.regex(_INT))
            self.eat("[")
            inner = self.expr()
            self.eat("]")
            return Deriv(inner, k)
        name = self.regex(_NAME)
        if name == "Id":
            return Ident()
        self.eat("(")
        i = 0
        if self.peek("e^"):
            self.eat("e^")
            i = int(self.regex(_INT))
        self.eat("z")
        self.eat(")")
        return Gen(name, i)


def parse_expr(text: str, refs: Optional[Callable] = None):
    """Parse grammar text into an expression tree."""
    p = _Parser(text, refs)
    out = p.expr()
    if not p.done():
        p.fail("trailing input")
    return out


def parse_field(text: str, system: GeneratorSystem, refs: Optional[Mapping] = None) -> Field:
    """Parse and canonicalize; ``refs`` maps names to fields or trees for ``<name>``."""
    lookup = None
    if refs is not None:
        def lookup(name):
            if name not in refs:
                raise ParseError(f"unknown field reference <{name}>")
            return refs[name]
    try:
        return canonicalize(parse_expr(text, lookup), system)
    except KeyError as exc:
        raise ParseError(str(exc)) from None
