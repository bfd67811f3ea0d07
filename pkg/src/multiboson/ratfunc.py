"""Bivariate rational functions with poles on {z = 0, w = 0, z = zeta w}.

The denominator is always kept in factored, monic form
``z^a * w^b * prod_q (z - root(q) w)^m_q`` where ``root(q) = exp(2 pi i q)``
and ``q`` is a rational in ``[0, 1)``.  Every constant lives in the numerator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Mapping

from gmpy2 import mpq

from .scalars import ONE, ZERO, Scalar, as_scalar, format_scalar, make_root

__all__ = [
    "RatFunc",
    "PoleError",
    "PartialFraction",
    "SeriesExpansion",
    "partial_fractions",
    "expand",
    "laurent_at",
    "root_scalar",
    "InterpolationReport",
    "verify_interpolation_identity",
    "format_laurent",
]

Poly = dict  # {(zdeg, wdeg): Scalar}, nonnegative degrees
Laurent = dict  # {wdeg: Scalar}, any integer degree


class PoleError(ValueError):
    """A denominator factor outside the allowed pole locus."""


def _frac(q) -> Fraction:
    q = Fraction(q)
    return q - (q.numerator // q.denominator)


@lru_cache(maxsize=None)
def root_scalar(q: Fraction) -> Scalar:
    """exp(2 pi i q) as a Scalar."""
    q = _frac(q)
    return make_root(q.denominator, q.numerator)


def _root_of(s: Scalar) -> Fraction:
    """Inverse of root_scalar for a root of unity; raises PoleError otherwise."""
    m = s.order
    if m == 1:
        c = s.coeffs[0]
        if c == 1:
            return Fraction(0)
        if c == -1:
            return Fraction(1, 2)
        raise PoleError(f"{format_scalar(s)} is not a root of unity")
    for k in range(2 * m):
        cand = Fraction(k, 2 * m)
        if root_scalar(cand) == s:
            return _frac(cand)
    raise PoleError(f"{format_scalar(s)} is not a root of unity")


# polynomial helpers ---------------------------------------------------------


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, ZERO) + (v if sign == 1 else -v)
        if nv.is_zero():
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: dict = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            key = (i + k, j + l)
            v = out.get(key)
            out[key] = x * y if v is None else v + x * y
    return {k: v for k, v in out.items() if not v.is_zero()}


def _pscale(a: Poly, c: Scalar) -> Poly:
    if c.is_zero():
        return {}
    return {k: v * c for k, v in a.items()}


@lru_cache(maxsize=None)
def _linear_power(q: Fraction, k: int) -> tuple:
    """(z - root(q) w)^k as a tuple of items."""
    r = -root_scalar(q)
    out = {}
    rp = ONE
    for j in range(k + 1):
        out[(k - j, j)] = as_scalar(comb(k, j)) * rp
        rp = rp * r
    return tuple((key, v) for key, v in out.items() if not v.is_zero())


def _divide_linear(p: Poly, q: Fraction):
    """Exact division of p by (z - root(q) w); None if not divisible."""
    r = root_scalar(q)
    # group by total degree; each homogeneous slice divides independently
    by_deg: dict[int, dict[int, Scalar]] = {}
    for (i, j), v in p.items():
        by_deg.setdefault(i + j, {})[i] = v
    out: Poly = {}
    for d, coeffs in by_deg.items():
        top = max(coeffs)
        # synthetic division in z of sum_i c_i z^i w^(d-i)
        carry = ZERO
        quot = {}
        for i in range(top, -1, -1):
            c = coeffs.get(i, ZERO) + carry
            if i == 0:
                if not c.is_zero():
                    return None
                break
            quot[i - 1] = c
            carry = c * r
        for i, c in quot.items():
            if not c.is_zero():
                out[(i, d - 1 - i)] = c
    return out


# the rational function --------------------------------------------------------


class RatFunc:
    """Immutable reduced quotient ``num / (z^a w^b prod (z - root(q) w)^m)``."""

    __slots__ = ("num", "zpow", "wpow", "roots", "_key")

    def __init__(self, num: Mapping, zpow: int = 0, wpow: int = 0, roots: Mapping | None = None,
                 _reduced: bool = False):
        num = {k: as_scalar(v) for k, v in num.items()}
        num = {k: v for k, v in num.items() if not v.is_zero()}
        roots = {_frac(q): m for q, m in (roots or {}).items() if m}
        if any(m < 0 for m in roots.values()):
            raise ValueError("negative root multiplicity")
        # negative exponents in numerator monomials move to the denominator
        if num:
            mi = min(i for i, _ in num)
            mj = min(j for _, j in num)
            if mi < 0:
                num = {(i - mi, j): v for (i, j), v in num.items()}
                zpow -= mi
            if mj < 0:
                num = {(i, j - mj): v for (i, j), v in num.items()}
                wpow -= mj
        if zpow < 0:
            num = {(i - zpow, j): v for (i, j), v in num.items()}
            zpow = 0
        if wpow < 0:
            num = {(i, j - wpow): v for (i, j), v in num.items()}
            wpow = 0
        self.num = num
        self.zpow = zpow
        self.wpow = wpow
        self.roots = roots
        self._key = None
        if not _reduced:
            self._cancel()

    # construction -----------------------------------------------------------

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls({(0, 0): as_scalar(c)})

    @classmethod
    def monomial(cls, c, i: int, j: int) -> "RatFunc":
        return cls({(i, j): as_scalar(c)})

    @classmethod
    def pole(cls, q, order: int = 1, c=ONE) -> "RatFunc":
        """c / (z - root(q) w)^order."""
        return cls({(0, 0): as_scalar(c)}, roots={_frac(q): order})

    @classmethod
    def from_laurent(cls, terms: Mapping) -> "RatFunc":
        """Bivariate Laurent polynomial {(i, j): c} -> RatFunc."""
        return cls(dict(terms))

    @classmethod
    def from_factors(cls, num: Mapping, den_scalar=ONE, zpow=0, wpow=0, den_roots: Mapping | None = None,
                     extra_den: Iterable = ()) -> "RatFunc":
        """Build from a numerator and a denominator given as root-of-unity linear factors.

        ``extra_den`` may list (c_z, c_w) pairs meaning a factor (c_z z + c_w w); both nonzero
        is required and the factor must lie on the allowed locus.
        """
        roots = dict(den_roots or {})
        scale = as_scalar(den_scalar)
        for cz, cw in extra_den:
            cz, cw = as_scalar(cz), as_scalar(cw)
            if cz.is_zero() or cw.is_zero():
                raise PoleError("degenerate linear factor")
            q = _root_of(-cw / cz)
            roots[q] = roots.get(q, 0) + 1
            scale = scale * cz
        return cls(_pscale(dict((k, as_scalar(v)) for k, v in num.items()), scale.inverse()),
                   zpow, wpow, roots)

    # canonical form ---------------------------------------------------------

    def _cancel(self):
        num = self.num
        if not num:
            self.zpow = self.wpow = 0
            self.roots = {}
            return
        for q in sorted(self.roots):
            m = self.roots[q]
            while m:
                d = _divide_linear(num, q)
                if d is None:
                    break
                num = d
                m -= 1
            self.roots[q] = m
        self.roots = {q: m for q, m in self.roots.items() if m}
        mi = min(i for i, _ in num)
        k = min(mi, self.zpow)
        if k:
            num = {(i - k, j): v for (i, j), v in num.items()}
            self.zpow -= k
        mj = min(j for _, j in num)
        k = min(mj, self.wpow)
        if k:
            num = {(i, j - k): v for (i, j), v in num.items()}
            self.wpow -= k
        self.num = num

    def key(self):
        if self._key is None:
            self._key = (
                tuple(sorted((k, v) for k, v in self.num.items())),
                self.zpow,
                self.wpow,
                tuple(sorted(self.roots.items())),
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Scalar)) or hasattr(other, "denominator"):
                other = RatFunc.const(other)
            else:
                return NotImplemented
        return (self.zpow == other.zpow and self.wpow == other.wpow and self.roots == other.roots
                and self.num == other.num)

    def __hash__(self):
        return hash((frozenset(self.num.items()), self.zpow, self.wpow, frozenset(self.roots.items())))

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def den_poly(self) -> Poly:
        p: Poly = {(self.zpow, self.wpow): ONE}
        for q, m in self.roots.items():
            p = _pmul(p, dict(_linear_power(q, m)))
        return p

    def pole_points(self) -> dict[Fraction, int]:
        return dict(self.roots)

    # arithmetic ---------------------------------------------------------------

    def __neg__(self):
        return RatFunc({k: -v for k, v in self.num.items()}, self.zpow, self.wpow, self.roots, _reduced=True)

    def __add__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(other)
        if not self.num:
            return other
        if not other.num:
            return self
        zp = max(self.zpow, other.zpow)
        wp = max(self.wpow, other.wpow)
        roots = dict(self.roots)
        for q, m in other.roots.items():
            roots[q] = max(roots.get(q, 0), m)

        def lift(f: RatFunc) -> Poly:
            p = {(i + zp - f.zpow, j + wp - f.wpow): v for (i, j), v in f.num.items()}
            for q, m in roots.items():
                extra = m - f.roots.get(q, 0)
                if extra:
                    p = _pmul(p, dict(_linear_power(q, extra)))
            return p

        return RatFunc(_padd(lift(self), lift(other)), zp, wp, roots)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RatFunc):
            other = RatFunc.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc.const(other) - self

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            if not self.num or not other.num:
                return RatFunc({})
            roots = dict(self.roots)
            for q, m in other.roots.items():
                roots[q] = roots.get(q, 0) + m
            need_cancel = bool(self.roots and other.num) or bool(other.roots and self.num)
            return RatFunc(_pmul(self.num, other.num), self.zpow + other.zpow, self.wpow + other.wpow,
                           roots, _reduced=not need_cancel)
        c = as_scalar(other)
        if c.is_zero():
            return RatFunc({})
        return RatFunc(_pscale(self.num, c), self.zpow, self.wpow, self.roots, _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RatFunc):
            return self * other.reciprocal()
        return self * as_scalar(other).inverse()

    def reciprocal(self) -> "RatFunc":
        """1/f; only valid when the numerator factors on the allowed locus."""
        if not self.num:
            raise ZeroDivisionError("reciprocal of zero RatFunc")
        num = self.num
        zp = min(i for i, _ in num)
        num = {(i - zp, j): v for (i, j), v in num.items()}
        wp = min(j for _, j in num)
        num = {(i, j - wp): v for (i, j), v in num.items()}
        roots: dict[Fraction, int] = {}
        # peel root-of-unity linear factors off the numerator
        changed = True
        while changed and any(i for i, _ in num):
            changed = False
            for q in _candidate_roots(num):
                d = _divide_linear(num, q)
                if d is not None:
                    num = d
                    roots[q] = roots.get(q, 0) + 1
                    changed = True
                    break
        if len(num) != 1 or next(iter(num)) != (0, 0):
            raise PoleError(f"reciprocal has a denominator factor off the allowed locus: {self}")
        c = num[(0, 0)]
        top = dict(self.den_poly())
        out = RatFunc(_pscale(top, c.inverse()), zp, wp, roots)
        return out

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = RatFunc.const(1)
        for _ in range(k):
            out = out * self
        return out

    # calculus and substitutions -----------------------------------------------

    def dz(self) -> "RatFunc":
        num_d = {(i - 1, j): v * i for (i, j), v in self.num.items() if i}
        out = RatFunc(num_d, self.zpow, self.wpow, self.roots)
        if self.zpow:
            out = out + RatFunc(_pscale(self.num, as_scalar(-self.zpow)), self.zpow + 1, self.wpow, self.roots)
        for q, m in self.roots.items():
            r = dict(self.roots)
            r[q] = m + 1
            out = out + RatFunc(_pscale(self.num, as_scalar(-m)), self.zpow, self.wpow, r)
        return out

    def dw(self) -> "RatFunc":
        num_d = {(i, j - 1): v * j for (i, j), v in self.num.items() if j}
        out = RatFunc(num_d, self.zpow, self.wpow, self.roots)
        if self.wpow:
            out = out + RatFunc(_pscale(self.num, as_scalar(-self.wpow)), self.zpow, self.wpow + 1, self.roots)
        for q, m in self.roots.items():
            r = dict(self.roots)
            r[q] = m + 1
            out = out + RatFunc(_pscale(self.num, root_scalar(q) * m), self.zpow, self.wpow, r)
        return out

    def scale(self, qz=0, qw=0) -> "RatFunc":
        """f(root(qz) z, root(qw) w)."""
        qz, qw = _frac(qz), _frac(qw)
        if not qz and not qw:
            return self
        cz, cw = root_scalar(qz), root_scalar(qw)
        num = {(i, j): v * cz ** i * cw ** j for (i, j), v in self.num.items()}
        # (cz z - r cw w) = cz (z - r cw/cz w)
        factor = cz ** (-self.zpow) * cw ** (-self.wpow)
        roots = {}
        for q, m in self.roots.items():
            roots[_frac(q + qw - qz)] = m
            factor = factor * cz ** (-m)
        return RatFunc(_pscale(num, factor), self.zpow, self.wpow, roots, _reduced=True)

    def swap(self) -> "RatFunc":
        """f(w, z)."""
        num = {(j, i): v for (i, j), v in self.num.items()}
        # (w - r z) = -r (z - r^-1 w)
        factor = ONE
        roots = {}
        for q, m in self.roots.items():
            roots[_frac(-q)] = m
            factor = factor * (-root_scalar(q)) ** m
        return RatFunc(_pscale(num, factor.inverse()), self.wpow, self.zpow, roots, _reduced=True)

    def power_substitute(self, s: int) -> "RatFunc":
        """f(z^s, w^s)."""
        if s == 1:
            return self
        num = {(i * s, j * s): v for (i, j), v in self.num.items()}
        roots: dict[Fraction, int] = {}
        for q, m in self.roots.items():
            for k in range(s):
                key = _frac((q + k) / s)
                roots[key] = roots.get(key, 0) + m
        return RatFunc(num, self.zpow * s, self.wpow * s, roots)

    def is_homogeneous(self) -> bool:
        return len({i + j for i, j in self.num}) <= 1

    def degree(self) -> int:
        degs = {i + j for i, j in self.num}
        if len(degs) != 1:
            raise ValueError("not homogeneous")
        return degs.pop() - self.zpow - self.wpow - sum(self.roots.values())

    def evaluate(self, z, w) -> Scalar:
        z, w = as_scalar(z), as_scalar(w)
        top = ZERO
        for (i, j), v in self.num.items():
            top = top + v * z ** i * w ** j
        den = z ** self.zpow * w ** self.wpow
        for q, m in self.roots.items():
            den = den * (z - root_scalar(q) * w) ** m
        return top / den

    # text ---------------------------------------------------------------------

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc('{format_ratfunc(self)}')"


def _candidate_roots(num: Poly) -> list[Fraction]:
    orders = {1, 2, 4}
    for v in num.values():
        orders.add(v.order)
    cands = set()
    for o in sorted(orders):
        for mult in (1, 2, 4):
            m = o * mult
            for k in range(m):
                cands.add(_frac(Fraction(k, m)))
    return sorted(cands)


# local expansions and partial fractions -------------------------------------------


def _lmul(a: Laurent, b: Laurent) -> Laurent:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            v = out.get(i + j)
            out[i + j] = x * y if v is None else v + x * y
    return {k: v for k, v in out.items() if not v.is_zero()}


def _ladd(a: Laurent, b: Laurent) -> Laurent:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, ZERO) + v
        if nv.is_zero():
            out.pop(k, None)
        else:
            out[k] = nv
    return out


def _series_mul(a: list, b: list, n: int) -> list:
    out = [dict() for _ in range(n)]
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j, y in enumerate(b[: n - i]):
            if y:
                out[i + j] = _ladd(out[i + j], _lmul(x, y))
    return out


def _inv_linear_series(c: Scalar, k: int, n: int) -> list:
    """(t + c w)^(-k) as a power series in t with Laurent-in-w coefficients."""
    out = []
    cinv = c.inverse()
    for i in range(n):
        coef = as_scalar(_gen_binom(-k, i)) * cinv ** (k + i)
        out.append({-k - i: coef})
    return out


def _gen_binom(a: int, k: int) -> int:
    num = 1
    for i in range(k):
        num *= a - i
    den = 1
    for i in range(1, k + 1):
        den *= i
    return num // den


@lru_cache(maxsize=200000)
def _laurent_at_cached(f: RatFunc, q: Fraction, upto: int) -> tuple:
    m = f.roots.get(q, 0)
    n = upto + m + 1
    if n <= 0:
        return ()
    xi = root_scalar(q)
    # numerator with z = t + xi w, as series in t
    series = [dict() for _ in range(n)]
    for (i, j), v in f.num.items():
        xp = ONE
        for a in range(i, -1, -1):
            # term C(i, a) t^a (xi w)^(i - a) w^j
            if a < n:
                coef = v * as_scalar(comb(i, a)) * xi ** (i - a)
                series[a] = _ladd(series[a], {i - a + j: coef})
    if f.wpow:
        series = [{k - f.wpow: v for k, v in s.items()} for s in series]
    if f.zpow:
        series = _series_mul(series, _inv_linear_series(xi, f.zpow, n), n)
    for r, mr in f.roots.items():
        if r == q:
            continue
        series = _series_mul(series, _inv_linear_series(xi - root_scalar(r), mr, n), n)
    return tuple((k - m, s) for k, s in enumerate(series) if s)


def laurent_at(f: RatFunc, q, upto: int) -> dict[int, Laurent]:
    """Expansion of f around z = root(q) w in powers of t = z - root(q) w.

    Returns ``{k: laurent_poly_in_w}`` for all exponents ``k <= upto``.
    """
    q = _frac(q)
    if not f.num:
        return {}
    return {k: dict(s) for k, s in _laurent_at_cached(f, q, upto)}


@dataclass
class PartialFraction:
    """Principal parts at each z = root(q) w plus a Laurent remainder in (z, w)."""

    poles: dict = field(default_factory=dict)  # {q: {order: Laurent}}
    remainder: dict = field(default_factory=dict)  # {(i, j): Scalar}

    def recombine(self) -> RatFunc:
        total = RatFunc.from_laurent(self.remainder)
        for q, parts in self.poles.items():
            for order, coeff in parts.items():
                num = {(0, k): v for k, v in coeff.items()}
                total = total + RatFunc(num, roots={q: order})
        return total

    def coefficient(self, q, order: int) -> Laurent:
        return self.poles.get(_frac(q), {}).get(order, {})


def principal_parts(f: RatFunc) -> dict:
    out = {}
    for q, m in sorted(f.roots.items()):
        loc = laurent_at(f, q, -1)
        parts = {-k: coeff for k, coeff in loc.items() if k < 0 and coeff}
        if parts:
            out[q] = parts
    return out


def partial_fractions(f: RatFunc) -> PartialFraction:
    poles = principal_parts(f)
    rest = f
    for q, parts in poles.items():
        for order, coeff in parts.items():
            rest = rest - RatFunc({(0, k): v for k, v in coeff.items()}, roots={q: order})
    if rest.roots:
        raise PoleError(f"partial fraction remainder kept poles {rest.roots}")
    remainder = {(i - rest.zpow, j - rest.wpow): v for (i, j), v in rest.num.items()}
    return PartialFraction(poles, remainder)


# series expansions ------------------------------------------------------------------


@dataclass
class SeriesExpansion:
    """Truncated expansion of a RatFunc in the region |z| >> |w| ("z") or |w| >> |z| ("w")."""

    direction: str
    order: int
    coeffs: dict  # {(zpow, wpow): Scalar}

    def _small(self, key) -> int:
        return key[1] if self.direction == "z" else key[0]

    def truncated(self, order: int) -> "SeriesExpansion":
        return SeriesExpansion(self.direction, order,
                               {k: v for k, v in self.coeffs.items() if self._small(k) <= order})

    def __mul__(self, other: "SeriesExpansion") -> "SeriesExpansion":
        if self.direction != other.direction:
            raise ValueError("cannot multiply expansions in different regions")
        order = min(self.order, other.order)
        mine = min((self._small(k) for k in self.coeffs), default=0)
        theirs = min((other._small(k) for k in other.coeffs), default=0)
        out: dict = {}
        for (a, b), x in self.coeffs.items():
            for (c, d), y in other.coeffs.items():
                key = (a + c, b + d)
                if self._small(key) > order:
                    continue
                out[key] = out.get(key, ZERO) + x * y
        # the product is exact only up to order + min(lowest degrees) of the factors
        exact = order + min(mine, theirs) if (mine < 0 or theirs < 0) else order
        out = {k: v for k, v in out.items() if not v.is_zero() and self._small(k) <= exact}
        return SeriesExpansion(self.direction, exact, out)

    def __sub__(self, other: "SeriesExpansion") -> "SeriesExpansion":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, ZERO) - v
        order = min(self.order, other.order)
        return SeriesExpansion(self.direction, order,
                               {k: v for k, v in out.items() if not v.is_zero() and self._small(k) <= order})

    def __eq__(self, other):
        if not isinstance(other, SeriesExpansion):
            return NotImplemented
        return self.direction == other.direction and self.order == other.order and self.coeffs == other.coeffs


def expand(f: RatFunc, direction: str = "z", order: int = 6) -> SeriesExpansion:
    """i_{z,w} (direction "z") or i_{w,z} (direction "w") expansion, truncated.

    Terms are kept up to degree ``order`` in the small variable (w for "z", z for "w").
    """
    if order < 0:
        raise ValueError("truncation order must be nonnegative")
    if direction not in ("z", "w"):
        raise ValueError("direction must be 'z' or 'w'")
    if not f.num:
        return SeriesExpansion(direction, order, {})
    small = 1 if direction == "z" else 0
    # lowest small-variable degree contributed by numerator and monomial factors
    num_low = min(k[small] for k in f.num)
    mono_low = -(f.wpow if direction == "z" else f.zpow)
    geo_low = 0 if direction == "z" else -sum(f.roots.values())
    budget = order - (num_low + mono_low + geo_low)
    terms: dict = {(-f.zpow, -f.wpow): ONE}
    for q, m in sorted(f.roots.items()):
        r = root_scalar(q)
        for _ in range(m):
            geo = {}
            for k in range(budget + 1):
                if direction == "z":
                    geo[(-k - 1, k)] = r ** k
                else:
                    geo[(k, -k - 1)] = -(r ** (-k - 1))
            terms = _mul_trunc(terms, geo, small, order + budget)
    out: dict = {}
    for (i, j), v in f.num.items():
        for (a, b), x in terms.items():
            key = (i + a, j + b)
            if key[small] > order:
                continue
            out[key] = out.get(key, ZERO) + v * x
    return SeriesExpansion(direction, order, {k: v for k, v in out.items() if not v.is_zero()})


def _mul_trunc(a: dict, b: dict, small: int, cap: int) -> dict:
    out: dict = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            key = (i + k, j + l)
            if key[small] > cap:
                continue
            out[key] = out.get(key, ZERO) + x * y
    return {k: v for k, v in out.items() if not v.is_zero()}


# formatting -----------------------------------------------------------------------


def _scalar_text(s: Scalar) -> str:
    if s.is_rational():
        return format_scalar(s)
    return "[" + format_scalar(s) + f"]_{s.order}"


def _mono_text(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("z" if i == 1 else f"z^{i}")
    if j:
        parts.append("w" if j == 1 else f"w^{j}")
    return "*".join(parts)


def _poly_text(num: Poly) -> str:
    keys = sorted(num, key=lambda k: (-(k[0] + k[1]), -k[0], k[1]))
    out = ""
    for n, key in enumerate(keys):
        c = num[key]
        mono = _mono_text(*key)
        if c.is_rational():
            q = c.to_rational()
            neg = q < 0
            mag = -q if neg else q
            if mono:
                body = mono if mag == 1 else f"{format_scalar(as_scalar(mag))}*{mono}"
            else:
                body = format_scalar(as_scalar(mag))
        else:
            neg = False
            body = _scalar_text(c) + (f"*{mono}" if mono else "")
        if n == 0:
            out = ("-" if neg else "") + body
        else:
            out += ("-" if neg else "+") + body
    return out


def _group_roots(roots: dict) -> list[tuple[int, Fraction, int]]:
    """Group linear factors into blocks (z^d - root(c) w^d)^m, largest d first."""
    left = dict(roots)
    blocks = []
    while left:
        done = False
        for d in range(len(left), 0, -1):
            for q0 in sorted(left):
                coset = [_frac(q0 + Fraction(k, d)) for k in range(d)]
                if all(c in left for c in coset):
                    m = min(left[c] for c in coset)
                    for c in coset:
                        left[c] -= m
                        if not left[c]:
                            del left[c]
                    blocks.append((d, _frac(q0 * d), m))
                    done = True
                    break
            if done:
                break
    merged: dict = {}
    for d, c, m in blocks:
        merged[(d, c)] = merged.get((d, c), 0) + m
    return sorted(((d, c, m) for (d, c), m in merged.items()), key=lambda t: (t[0], t[1]))


def _block_text(d: int, c: Fraction) -> str:
    zt = "z" if d == 1 else f"z^{d}"
    wt = "w" if d == 1 else f"w^{d}"
    if c == 0:
        return f"{zt}-{wt}"
    if c == Fraction(1, 2):
        return f"{zt}+{wt}"
    return f"{zt}-root({c})*{wt}"


def format_ratfunc(f: RatFunc) -> str:
    """Canonical text, e.g. ``-(z^2+w^2)/(2*(z^2-w^2)^2)``."""
    if not f.num:
        return "0"
    num = dict(f.num)
    sign = ""
    outer = None
    if all(v.is_rational() for v in num.values()):
        vals = [v.to_rational() for v in num.values()]
        g_num = 0
        l_den = 1
        for v in vals:
            g_num = gcd(g_num, int(v.numerator))
            l_den = l_den * int(v.denominator) // gcd(l_den, int(v.denominator))
        lead = num[sorted(num, key=lambda k: (-(k[0] + k[1]), -k[0], k[1]))[0]].to_rational()
        content = mpq(g_num, l_den) * (1 if lead > 0 else -1)
        num = {k: as_scalar(v.to_rational() / content) for k, v in num.items()}
        if content < 0:
            sign = "-"
            content = -content
        outer = content
    top = _poly_text(num)
    multi = len(num) > 1
    den_parts = []
    if outer is not None and outer.denominator != 1:
        den_parts.append(str(outer.denominator))
    if outer is not None and outer.numerator != 1:
        if top == "1":
            top = str(outer.numerator)
        else:
            top = f"{outer.numerator}*({top})" if multi else f"{outer.numerator}*{top}"
            multi = False
    if f.zpow:
        den_parts.append("z" if f.zpow == 1 else f"z^{f.zpow}")
    if f.wpow:
        den_parts.append("w" if f.wpow == 1 else f"w^{f.wpow}")
    for d, c, m in _group_roots(f.roots):
        b = f"({_block_text(d, c)})"
        den_parts.append(b if m == 1 else f"{b}^{m}")
    if multi and (sign or den_parts):
        top = f"({top})"
    if not den_parts:
        return sign + top
    if len(den_parts) == 1:
        den = den_parts[0]
    else:
        den = "(" + "*".join(den_parts) + ")"
    return f"{sign}{top}/{den}"


def format_laurent(coeff: Laurent, var: str = "w") -> str:
    if not coeff:
        return "0"
    out = ""
    for n, k in enumerate(sorted(coeff, reverse=True)):
        c = coeff[k]
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        text = _scalar_text(c)
        if mono:
            text = mono if text == "1" else ("-" + mono if text == "-1" else f"{text}*{mono}")
        if n and not text.startswith("-"):
            out += "+"
        out += text
    return out


# the root-of-unity interpolation identity --------------------------------------------


@dataclass
class InterpolationReport:
    n: int
    l: int
    equal: bool
    lhs: str
    rhs: str


def verify_interpolation_identity(n: int, l: int) -> InterpolationReport:
    """sum_k eps^(k l)/(z + eps^k w) against 2n (-1)^l z^(l-1) w^(2n-l)/(z^(2n) - w^(2n))."""
    if n < 1 or not 1 <= l <= 2 * n:
        raise ValueError("need n >= 1 and 1 <= l <= 2n")
    big = 2 * n
    lhs = RatFunc({})
    for k in range(big):
        coef = root_scalar(Fraction(k * l, big))
        # z + eps^k w = z - root((k + n)/2n) w
        lhs = lhs + RatFunc.pole(Fraction(k + n, big), 1, coef)
    roots = {Fraction(j, big): 1 for j in range(big)}
    rhs = RatFunc({(l - 1, big - l): as_scalar(big * (-1) ** l)}, roots=roots)
    return InterpolationReport(n, l, lhs == rhs, format_ratfunc(lhs), format_ratfunc(rhs))
