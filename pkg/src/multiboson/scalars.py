"""Exact arithmetic in cyclotomic fields Q(zeta_M).

A :class:`Scalar` is a polynomial in ``zeta_M`` of degree below ``phi(M)``,
reduced modulo the M-th cyclotomic polynomial, with arbitrary precision
rational coefficients.  Operands of different orders are promoted to the
lcm of their orders.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

from gmpy2 import mpq

__all__ = [
    "Scalar",
    "make_root",
    "parse_scalar",
    "as_scalar",
    "cyclotomic_poly",
    "euler_phi",
    "ZERO",
    "ONE",
    "I",
]

Number = Union[int, "mpq", "Scalar"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return sum(1 for k in range(1, m + 1) if gcd(k, m) == 1)


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m):
        if d < m:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[mpq, ...], ...]:
    """Reduced coefficient vectors of x^k mod Phi_m for 0 <= k < 2m."""
    phi = euler_phi(m)
    cyc = cyclotomic_poly(m)
    rows = []
    vec = [mpq(0)] * phi
    vec[0] = mpq(1)
    for _ in range(2 * m):
        rows.append(tuple(vec))
        # multiply by x and reduce the overflow with x^phi = -sum cyc[i] x^i
        top = vec[-1]
        vec = [mpq(0)] + vec[:-1]
        if top:
            for i in range(phi):
                vec[i] -= top * cyc[i]
    return tuple(rows)


def _reduce(m: int, raw: dict[int, mpq]) -> tuple[mpq, ...]:
    phi = euler_phi(m)
    table = _power_table(m)
    out = [mpq(0)] * phi
    for k, c in raw.items():
        if not c:
            continue
        row = table[k % m]
        for i in range(phi):
            if row[i]:
                out[i] += c * row[i]
    return tuple(out)


class Scalar:
    """Element of Q(zeta_M) in canonical reduced form."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Iterable):
        coeffs = tuple(mpq(c) for c in coeffs)
        if len(coeffs) != euler_phi(order):
            raise ValueError(f"Q(zeta_{order}) needs {euler_phi(order)} coefficients")
        if order > 1 and not any(coeffs[1:]):
            order, coeffs = 1, coeffs[:1]
        self.order = order
        self.coeffs = coeffs
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def rational(cls, value) -> "Scalar":
        return cls(1, (mpq(value),))

    def is_rational(self) -> bool:
        return self.order == 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_rational(self) -> mpq:
        if self.order != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def promote(self, order: int) -> "Scalar":
        """Embed into Q(zeta_order); ``order`` must be a multiple of self.order."""
        if order % self.order:
            raise ValueError(f"cannot embed Q(zeta_{self.order}) in Q(zeta_{order})")
        if order == self.order or self.order == 1:
            if self.order == 1 and order != 1:
                return _Raw(order, _reduce(order, {0: self.coeffs[0]}))
            return self
        step = order // self.order
        raw = {k * step: c for k, c in enumerate(self.coeffs)}
        return _Raw(order, _reduce(order, raw))

    def _pair(self, other) -> tuple[int, tuple, tuple]:
        other = as_scalar(other)
        if self.order == other.order:
            return self.order, self.coeffs, other.coeffs
        if other.order == 1:
            c = list(self.coeffs)
            rest = [mpq(0)] * (len(c) - 1)
            return self.order, self.coeffs, (other.coeffs[0], *rest)
        if self.order == 1:
            rest = [mpq(0)] * (euler_phi(other.order) - 1)
            return other.order, (self.coeffs[0], *rest), other.coeffs
        m = _lcm(self.order, other.order)
        return m, self.promote(m).coeffs, other.promote(m).coeffs

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        try:
            m, a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return Scalar(m, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return _Raw(self.order, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        try:
            m, a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return Scalar(m, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __mul__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if other.order == 1:
            c = other.coeffs[0]
            return Scalar(self.order, [x * c for x in self.coeffs])
        if self.order == 1:
            c = self.coeffs[0]
            return Scalar(other.order, [x * c for x in other.coeffs])
        m, a, b = self._pair(other)
        raw: dict[int, mpq] = {}
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    raw[i + j] = raw.get(i + j, mpq(0)) + x * y
        return Scalar(m, _reduce(m, raw))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        if self.order == 1:
            return _Raw(1, (1 / self.coeffs[0],))
        m = self.order
        phi = euler_phi(m)
        # columns: self * zeta^k; solve for x with (self * x) = 1
        cols = []
        for k in range(phi):
            raw = {i + k: c for i, c in enumerate(self.coeffs) if c}
            cols.append(_reduce(m, raw))
        mat = [[cols[k][r] for k in range(phi)] + [mpq(1 if r == 0 else 0)] for r in range(phi)]
        sol = _solve(mat, phi)
        return Scalar(m, sol)

    def __truediv__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        try:
            m, a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        return a == b

    def __hash__(self):
        if self._hash is None:
            m, coeffs = _minimal_form(self.order, self.coeffs)
            self._hash = hash((m, coeffs)) if m != 1 else hash(coeffs[0])
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # text -----------------------------------------------------------------

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({self.order}, '{format_scalar(self)}')"


def _Raw(order: int, coeffs: tuple) -> Scalar:
    s = object.__new__(Scalar)
    if order > 1 and not any(coeffs[1:]):
        order, coeffs = 1, coeffs[:1]
    s.order = order
    s.coeffs = coeffs
    s._hash = None
    return s


def _solve(mat: list[list[mpq]], n: int) -> list[mpq]:
    """Gauss-Jordan on an augmented n x (n+1) matrix over Q."""
    for col in range(n):
        piv = next(r for r in range(col, n) if mat[r][col])
        mat[col], mat[piv] = mat[piv], mat[col]
        p = mat[col][col]
        mat[col] = [x / p for x in mat[col]]
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
    return [mat[r][n] for r in range(n)]


@lru_cache(maxsize=4096)
def _minimal_form(m: int, coeffs: tuple) -> tuple[int, tuple]:
    """Smallest order d | m with the value in Q(zeta_d), and its coefficients there."""
    if m == 1:
        return 1, coeffs
    for d in _divisors(m):
        if d == m:
            break
        phi_d = euler_phi(d)
        step = m // d
        basis = [_reduce(m, {k * step: mpq(1)}) for k in range(phi_d)]
        phi_m = len(coeffs)
        # least squares is unnecessary: check consistency of the overdetermined system
        rows = [[basis[k][r] for k in range(phi_d)] + [coeffs[r]] for r in range(phi_m)]
        sol = _try_solve(rows, phi_d)
        if sol is not None:
            return (d, tuple(sol)) if d != 2 else (1, (sol[0],))
    return m, coeffs


def _try_solve(rows: list[list[mpq]], n: int):
    rows = [list(r) for r in rows]
    rank = 0
    pivots = []
    for col in range(n):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        rows[rank] = [x / p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    if any(rows[r][n] for r in range(rank, len(rows))):
        return None
    sol = [mpq(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = rows[r][n]
    return sol


def as_scalar(value) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, type(mpq(0)))):
        return _Raw(1, (mpq(value),))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return _Raw(1, (mpq(value.numerator, value.denominator),))
    raise TypeError(f"cannot convert {value!r} to Scalar")


def make_root(m: int, k: int) -> Scalar:
    """zeta_m ** k in canonical form."""
    if m < 1:
        raise ValueError("root order must be positive")
    k %= m
    if m <= 2:
        return _Raw(1, (mpq(1 if k == 0 else -1),))
    return Scalar(m, _reduce(m, {k: mpq(1)}))


ZERO = _Raw(1, (mpq(0),))
ONE = _Raw(1, (mpq(1),))
I = make_root(4, 1)


def format_scalar(s: Scalar) -> str:
    """Text form ``"1/2 + 3*e^2"`` with ``e`` the generator zeta_M of the scalar's order."""
    if s.order == 1:
        return _fmt_q(s.coeffs[0])
    parts = []
    for k, c in enumerate(s.coeffs):
        if not c:
            continue
        if k == 0:
            body = _fmt_q(c)
        else:
            mono = "e" if k == 1 else f"e^{k}"
            if c == 1:
                body = mono
            elif c == -1:
                body = "-" + mono
            else:
                body = f"{_fmt_q(c)}*{mono}"
        parts.append(body)
    text = parts[0]
    for p in parts[1:]:
        text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return text


def _fmt_q(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(e(?:\s*\^\s*(-?\d+))?)?\s*"
)


def parse_scalar(text: str, order: int = 1) -> Scalar:
    """Parse ``"1/2 + 3*e^2"`` where ``e`` denotes zeta_order."""
    pos = 0
    total = ZERO
    text = text.strip()
    if not text:
        raise ValueError("empty scalar literal")
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ValueError(f"bad scalar literal {text!r} at position {pos}")
        if not first and m.group(1) is None:
            raise ValueError(f"missing operator in {text!r} at position {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = mpq(m.group(2)) if m.group(2) else mpq(1)
        term = as_scalar(sign * coeff)
        if m.group(3):
            if order < 1:
                raise ValueError("root order must be positive")
            k = int(m.group(4)) if m.group(4) is not None else 1
            term = term * make_root(order, k)
        total = total + term
        pos = m.end()
        first = False
    return total
