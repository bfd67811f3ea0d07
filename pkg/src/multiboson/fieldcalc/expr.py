"""Expression trees for the field language and their canonical forms.

Trees are cheap, immutable descriptions; nothing is evaluated until
``canonicalize`` turns a tree into a :class:`Field`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..ratfunc import format_ratfunc
from ..scalars import ONE, Scalar, as_scalar, format_scalar
from .field import Field
from .system import GeneratorSystem
from .wick import normal_product, ope

__all__ = [
    "Gen",
    "Ident",
    "Deriv",
    "NormalProd",
    "Linear",
    "OpeCoeff",
    "FieldExpr",
    "canonicalize",
    "to_expr",
    "normal_prod",
    "expr_parity",
    "format_field",
    "format_ope",
    "format_coeff",
]


@dataclass(frozen=True)
class Gen:
    """Generator at argument eps^i z."""

    name: str
    i: int = 0


@dataclass(frozen=True)
class Ident:
    pass


@dataclass(frozen=True)
class Deriv:
    sub: "FieldExpr"
    k: int = 1


@dataclass(frozen=True)
class NormalProd:
    """:left(eps^i z) right(z):"""

    left: "FieldExpr"
    right: "FieldExpr"
    i: int = 0


@dataclass(frozen=True)
class Linear:
    """sum of c * z^l * term over a tuple of (c, l, term)."""

    terms: tuple


@dataclass(frozen=True)
class OpeCoeff:
    """The coefficient of 1/(z - eps^j w)^(k+1) in the OPE a(z) b(w), as a field of w."""

    left: "FieldExpr"
    right: "FieldExpr"
    j: int
    k: int


FieldExpr = Union[Gen, Ident, Deriv, NormalProd, Linear, OpeCoeff, Field]


def canonicalize(expr, system: GeneratorSystem) -> Field:
    if isinstance(expr, Field):
        if expr.system is not system:
            raise ValueError(f"field over {expr.system.name} used in system {system.name}")
        return expr
    if isinstance(expr, Gen):
        return Field.generator(system, expr.name, expr.i)
    if isinstance(expr, Ident):
        return Field.identity(system)
    if isinstance(expr, Deriv):
        return canonicalize(expr.sub, system).derivative(expr.k)
    if isinstance(expr, NormalProd):
        return normal_product(canonicalize(expr.left, system), canonicalize(expr.right, system), expr.i)
    if isinstance(expr, Linear):
        out = Field.zero(system)
        for c, l, term in expr.terms:
            out = out + canonicalize(term, system).shift(l) * as_scalar(c)
        return out
    if isinstance(expr, OpeCoeff):
        res = ope(canonicalize(expr.left, system), canonicalize(expr.right, system))
        return res.coefficient(expr.j, expr.k)
    raise TypeError(f"not a field expression: {expr!r}")


def normal_prod(a, b, i: int = 0) -> NormalProd:
    return NormalProd(a, b, i)


def expr_parity(expr, system: GeneratorSystem):
    """Structural parity: 0, 1, or None for a mixed sum."""
    if isinstance(expr, Field):
        return expr.parity()
    if isinstance(expr, Gen):
        return system.generator(expr.name).parity
    if isinstance(expr, Ident):
        return 0
    if isinstance(expr, Deriv):
        return expr_parity(expr.sub, system)
    if isinstance(expr, (NormalProd, OpeCoeff)):
        a, b = expr_parity(expr.left, system), expr_parity(expr.right, system)
        return None if a is None or b is None else (a + b) % 2
    if isinstance(expr, Linear):
        pars = {expr_parity(t, system) for _, _, t in expr.terms}
        if None in pars or len(pars) > 1:
            return None
        return pars.pop() if pars else 0
    raise TypeError(f"not a field expression: {expr!r}")


def _atom_expr(system, atom):
    g, r, i = atom
    node = Gen(system.generators[g].name, i)
    return Deriv(node, r) if r else node


def to_expr(f: Field) -> Linear:
    """Canonical field back to a tree: sums of c z^l times right-nested products."""
    terms = []
    for (l, mono), c in sorted(f.terms.items(), key=lambda kv: _term_order(kv[0])):
        terms.append((c, l, _mono_expr(f.system, mono)))
    return Linear(tuple(terms))


def _mono_expr(system, mono):
    if not mono:
        return Ident()
    node = _atom_expr(system, mono[-1])
    for atom in reversed(mono[:-1]):
        node = NormalProd(_atom_expr(system, atom), node)
    return node


# text ---------------------------------------------------------------------------


def _term_order(key):
    l, mono = key
    return (len(mono), mono, l)


def format_coeff(c: Scalar, l: int, var: str = "z") -> str:
    text = format_scalar(c) if c.is_rational() else "{" + format_scalar(c) + "}_" + str(c.order)
    if l:
        text += f" {var}^{l}"
    return text


def _atom_text(system, atom, var):
    g, r, i = atom
    base = f"{system.generators[g].name}(e^{i} {var})"
    return f"D^{r}[{base}]" if r else base


def _mono_text(system, mono, var):
    if not mono:
        return "Id"
    text = _atom_text(system, mono[-1], var)
    for atom in reversed(mono[:-1]):
        text = f":{_atom_text(system, atom, var)} {text}:"
    return text


def format_field(f: Field, var: str = "z") -> str:
    """Grammar text such as ``1/2 z^-1 * chi(e^0 z) + -1/2 z^-1 * chi(e^1 z)``."""
    if f.is_zero():
        return "0"
    parts = []
    for (l, mono), c in sorted(f.terms.items(), key=lambda kv: _term_order(kv[0])):
        body = _mono_text(f.system, mono, var)
        if c == ONE and l == 0:
            parts.append(body)
        else:
            parts.append(f"{format_coeff(c, l, var)} * {body}")
    return " + ".join(parts)


def format_ope(res) -> str:
    from fractions import Fraction

    from ..ratfunc import RatFunc

    if res.is_zero():
        return "0"
    n = res.system.num_points
    parts = []
    for j, k in sorted(res.terms):
        pole = format_ratfunc(RatFunc.pole(Fraction(j, n), k + 1))
        parts.append(f"{pole} * [{format_field(res.terms[(j, k)], 'w')}]")
    return " + ".join(parts)
