"""Multilocal Wick calculus on canonical fields.

The product a(z) b(w) of two fully normal ordered free-field monomials is a
finite sum ``f(z, w) :X(z) Y(w):`` over partial contraction sets.  Each
rational prefactor ``f`` is expanded around the poles ``z = eps^j w``; the
leftover normal ordered product is Taylor expanded at the same point, which
re-centers every coefficient at ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from ..ratfunc import Laurent, PoleError, RatFunc, laurent_at
from ..scalars import ONE, Scalar
from .field import Field
from .system import GeneratorSystem

__all__ = [
    "OpeResult",
    "ope",
    "normal_product",
    "taylor_recenter",
    "locality_profile",
    "ope_coefficient",
    "wick_groups",
    "singular_part",
    "atom_contraction",
]


@lru_cache(maxsize=100000)
def atom_contraction(system: GeneratorSystem, left: tuple, right: tuple) -> RatFunc:
    """Contraction of d^r[g(eps^i z)] with d^r'[h(eps^i' w)] as a RatFunc in (z, w)."""
    g, r, i = left
    h, s, k = right
    n = system.num_points
    rf = system.contraction(g, h).scale(Fraction(i, n), Fraction(k, n))
    for _ in range(r):
        rf = rf.dz()
    for _ in range(s):
        rf = rf.dw()
    return rf


def _odd_inversions(order: list[int], odd: list[bool]) -> int:
    count = 0
    for x in range(len(order)):
        if not odd[order[x]]:
            continue
        for y in range(x + 1, len(order)):
            if odd[order[y]] and order[y] < order[x]:
                count += 1
    return count


def _matchings(na: int, nb: int) -> Iterator[list[tuple[int, int]]]:
    """All partial matchings between range(na) and range(nb), as lists of pairs."""

    def rec(a: int, used: frozenset):
        if a == na:
            yield []
            return
        for rest in rec(a + 1, used):
            yield rest
        for b in range(nb):
            if b not in used:
                for rest in rec(a + 1, used | {b}):
                    yield [(a, b)] + rest

    yield from rec(0, frozenset())


def wick_groups(a: Field, b: Field, include_uncontracted: bool = False) -> dict:
    """Group the Wick expansion of a(z) b(w) by leftover monomials.

    Returns ``{(X, Y): f}`` meaning ``f(z, w) :X(z) Y(w):`` where X and Y are
    monomials (tuples of atoms) and f a RatFunc carrying all prefactors.
    """
    system = a.system
    if b.system is not system:
        raise ValueError(f"fields over different systems: {system.name} vs {b.system.name}")
    groups: dict = {}
    for (l1, m1), c1 in a.terms.items():
        for (l2, m2), c2 in b.terms.items():
            base = RatFunc.monomial(c1 * c2, l1, l2)
            atoms = list(m1) + list(m2)
            odd = [bool(system.generators[x[0]].parity) for x in atoms]
            for match in _matchings(len(m1), len(m2)):
                if not match and not include_uncontracted:
                    continue
                rf = base
                for p, q in match:
                    rf = rf * atom_contraction(system, m1[p], m2[q])
                    if rf.is_zero():
                        break
                if rf.is_zero():
                    continue
                ma = {p for p, _ in match}
                mb = {q for _, q in match}
                left = [p for p in range(len(m1)) if p not in ma]
                right = [len(m1) + q for q in range(len(m2)) if q not in mb]
                if any(odd):
                    order = left + right + [x for p, q in match for x in (p, len(m1) + q)]
                    if _odd_inversions(order, odd) % 2:
                        rf = -rf
                key = (tuple(m1[p] for p in left), tuple(m2[q - len(m1)] for q in right))
                cur = groups.get(key)
                groups[key] = rf if cur is None else cur + rf
    return {k: v for k, v in groups.items() if not v.is_zero()}


def _pole_index(system: GeneratorSystem, q: Fraction) -> int:
    j = q * system.num_points
    if j.denominator != 1:
        raise PoleError(f"pole at root({q}) is not a {system.num_points}-th root of unity")
    return int(j)


def singular_part(system: GeneratorSystem, groups: dict) -> dict:
    """{(j, k): c_jk} from Wick groups; c_jk multiplies 1/(z - eps^j w)^(k+1)."""
    out: dict = {}
    taylor_cache: dict = {}

    def taylor(mono, t, j):
        key = (mono, t, j)
        if key not in taylor_cache:
            taylor_cache[key] = Field(system, {(0, mono): ONE}).taylor(t, j)
        return taylor_cache[key]

    for (xm, ym), rf in groups.items():
        yf = Field(system, {(0, ym): ONE})
        for q, mult in sorted(rf.roots.items()):
            j = _pole_index(system, q)
            loc = laurent_at(rf, q, -1)
            for k in range(mult):
                acc = None
                for t in range(mult - k):
                    coeff: Laurent = loc.get(-(k + 1) - t)
                    if not coeff:
                        continue
                    term = taylor(xm, t, j).nomul(yf).times_laurent(coeff)
                    acc = term if acc is None else acc + term
                if acc is not None:
                    cur = out.get((j, k))
                    out[(j, k)] = acc if cur is None else cur + acc
    return {key: f for key, f in out.items() if not f.is_zero()}


@dataclass
class OpeResult:
    """Singular part sum_{j,k} c_jk(w) / (z - eps^j w)^(k+1) of a(z) b(w)."""

    system: GeneratorSystem
    terms: dict = field(default_factory=dict)  # {(j, k): Field}

    def coefficient(self, j: int, k: int) -> Field:
        return self.terms.get((j % self.system.num_points, k), Field.zero(self.system))

    def is_zero(self) -> bool:
        return not self.terms

    def pole_orders(self) -> list[int]:
        orders = [0] * self.system.num_points
        for j, k in self.terms:
            orders[j] = max(orders[j], k + 1)
        return orders

    def central(self) -> RatFunc:
        """The identity-field terms recombined into a single RatFunc of (z, w)."""
        n = self.system.num_points
        total = RatFunc({})
        for (j, k), f in self.terms.items():
            ident = f.identity_part()
            if ident:
                num = {(0, l): c for l, c in ident.items()}
                total = total + RatFunc(num, roots={Fraction(j, n): k + 1})
        return total

    def non_central(self) -> dict:
        out = {}
        for key, f in self.terms.items():
            rest = f.non_identity()
            if rest:
                out[key] = rest
        return out

    def to_ratfunc_terms(self) -> list[tuple[RatFunc, Field]]:
        """Pairs (1/(z - eps^j w)^(k+1), c_jk) in sorted order."""
        n = self.system.num_points
        return [(RatFunc.pole(Fraction(j, n), k + 1), self.terms[(j, k)]) for j, k in sorted(self.terms)]

    def __eq__(self, other):
        if not isinstance(other, OpeResult):
            return NotImplemented
        return self.system is other.system and self.terms == other.terms

    def __str__(self):
        from .expr import format_ope

        return format_ope(self)


def ope(a: Field, b: Field) -> OpeResult:
    """Exact singular part of a(z) b(w)."""
    system = a.system
    if a.is_zero() or b.is_zero():
        return OpeResult(system)
    return OpeResult(system, singular_part(system, wick_groups(a, b)))


def ope_coefficient(a: Field, b: Field, j: int, k: int) -> Field:
    return ope(a, b).coefficient(j, k)


def normal_product(a: Field, b: Field, i: int = 0) -> Field:
    """The normal ordered product :a(eps^i z) b(z): as a canonical field.

    The annihilation part of a composite field is the part with nonnegative
    raw modes.  Removing [a_-(z), b(w)] from a(z) b(w) and letting w -> z
    leaves, for each Wick group f :X Y:, the residues of
    f(x, z) :X(x) Y(z): / (x - z) at the poles x = eps^j z; the residue at
    x = z also carries the uncontracted term.
    """
    system = a.system
    if b.system is not system:
        raise ValueError(f"fields over different systems: {system.name} vs {b.system.name}")
    if a.is_zero() or b.is_zero():
        return Field.zero(system)
    a = a.dilate(i)
    shift = RatFunc.pole(0, 1)
    groups = {key: rf * shift for key, rf in wick_groups(a, b, include_uncontracted=True).items()}
    out = Field.zero(system)
    for (j, k), f in singular_part(system, groups).items():
        if k == 0:
            out = out + f
    return out


def taylor_recenter(a: Field, i: int, order: int) -> list[tuple[Field, int]]:
    """a(z) = sum_t (z - eps^i w)^t c_t(w) up to t = order; returns [(c_t, t)]."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    return [(a.taylor(t, i), t) for t in range(order + 1)]


def locality_profile(a: Field, b: Field) -> tuple[int, ...]:
    """Pole orders (n_0, ..., n_{N-1}) of the (super)commutator of a(z) and b(w)."""
    n = a.system.num_points
    ab = ope(a, b).pole_orders()
    ba = ope(b, a).pole_orders()
    return tuple(max(ab[j], ba[(-j) % n]) for j in range(n))
