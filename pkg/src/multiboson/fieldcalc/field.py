"""Canonical fields: finite sums of c * z^l * :A_1 ... A_k: over free atoms.

An atom ``(g, r, i)`` stands for the r-th z-derivative of the dilated
generator, d^r/dz^r [G_g(eps^i z)].  The colons denote the full free-field
normal ordering (every creation mode left of every annihilation mode), which
is supercommutative, so a monomial is a sorted tuple of atoms.
"""

from __future__ import annotations

from math import factorial
from typing import Iterable, Mapping

from gmpy2 import mpq

from ..scalars import ONE, ZERO, Scalar, as_scalar
from .system import GeneratorSystem

__all__ = ["Field", "canon_atom", "sort_monomial"]


def canon_atom(system: GeneratorSystem, g: int, r: int, i: int) -> tuple[Scalar, tuple]:
    """Reduce the dilation index of an atom to its period; returns (factor, atom)."""
    period = system.dilation_period(g)
    i %= system.num_points
    red = i % period
    if red == i:
        return ONE, (g, r, i)
    delta = i - red
    gen = system.generators[g]
    # G(eps^i z) = eps^(-delta * offset) G(eps^red z) when delta * power = 0 mod N
    return system.eps_power(-delta * int(gen.offset)), (g, r, red)


def sort_monomial(system: GeneratorSystem, atoms: Iterable) -> tuple[int, tuple]:
    """Supercommutative sort; returns (sign, monomial) with sign 0 for a vanishing monomial."""
    atoms = list(atoms)
    odd = [system.generators[a[0]].parity for a in atoms]
    if not any(odd):
        return 1, tuple(sorted(atoms))
    sign = 1
    # bubble sort tracking transpositions of odd atoms
    for i in range(len(atoms)):
        for j in range(len(atoms) - 1 - i):
            if atoms[j] > atoms[j + 1]:
                if odd[j] and odd[j + 1]:
                    sign = -sign
                atoms[j], atoms[j + 1] = atoms[j + 1], atoms[j]
                odd[j], odd[j + 1] = odd[j + 1], odd[j]
    for j in range(len(atoms) - 1):
        if odd[j] and atoms[j] == atoms[j + 1]:
            return 0, tuple(atoms)
    return sign, tuple(atoms)


class Field:
    """Immutable canonical field over a GeneratorSystem.

    ``terms`` maps ``(l, monomial)`` to the Scalar coefficient of
    ``z^l * :monomial:``; the empty monomial is the identity field.
    """

    __slots__ = ("system", "terms")

    def __init__(self, system: GeneratorSystem, terms: Mapping | None = None):
        self.system = system
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    # constructors ---------------------------------------------------------------

    @classmethod
    def zero(cls, system) -> "Field":
        return cls(system, {})

    @classmethod
    def identity(cls, system, coeff=ONE, l: int = 0) -> "Field":
        return cls(system, {(l, ()): as_scalar(coeff)})

    @classmethod
    def atom(cls, system, name, r: int = 0, i: int = 0) -> "Field":
        c, a = canon_atom(system, system.index(name), r, i)
        return cls(system, {(0, (a,)): c})

    @classmethod
    def generator(cls, system, name, i: int = 0) -> "Field":
        return cls.atom(system, name, 0, i)

    # inspection -----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return self.system is other.system and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def parity(self) -> int | None:
        """0 or 1 for homogeneous fields, None for mixed parity."""
        pars = {sum(self.system.generators[a[0]].parity for a in mono) % 2 for (_, mono) in self.terms}
        if len(pars) > 1:
            return None
        return pars.pop() if pars else 0

    def is_homogeneous(self) -> bool:
        return self.parity() is not None

    def identity_part(self) -> dict[int, Scalar]:
        """{l: c} for the c * z^l * Id terms."""
        return {l: c for (l, mono), c in self.terms.items() if not mono}

    def non_identity(self) -> "Field":
        return Field(self.system, {k: v for k, v in self.terms.items() if k[1]})

    def max_atoms(self) -> int:
        return max((len(m) for _, m in self.terms), default=0)

    # linear structure -----------------------------------------------------------

    def __add__(self, other: "Field") -> "Field":
        if not isinstance(other, Field):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            out[k] = v if cur is None else cur + v
        return Field(self.system, out)

    def __sub__(self, other: "Field") -> "Field":
        return self + (-other)

    def __neg__(self) -> "Field":
        return Field(self.system, {k: -v for k, v in self.terms.items()})

    def __mul__(self, c) -> "Field":
        if isinstance(c, Field):
            return NotImplemented
        c = as_scalar(c)
        if c.is_zero():
            return Field(self.system)
        return Field(self.system, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Field":
        return self * as_scalar(c).inverse()

    def shift(self, l: int) -> "Field":
        """z^l * self."""
        if not l:
            return self
        return Field(self.system, {(k + l, m): v for (k, m), v in self.terms.items()})

    def times_laurent(self, coeff: Mapping) -> "Field":
        """(sum_l c_l z^l) * self."""
        out = Field(self.system)
        for l, c in coeff.items():
            out = out + self.shift(l) * c
        return out

    def _check(self, other: "Field"):
        if self.system is not other.system:
            raise ValueError(f"fields over different systems: {self.system.name} vs {other.system.name}")

    # operations -------------------------------------------------------------------

    def derivative(self, k: int = 1) -> "Field":
        out = self
        for _ in range(k):
            out = out._derivative_once()
        return out

    def _derivative_once(self) -> "Field":
        acc: dict = {}

        def put(key, val):
            cur = acc.get(key)
            acc[key] = val if cur is None else cur + val

        for (l, mono), c in self.terms.items():
            if l:
                put((l - 1, mono), c * l)
            for pos, (g, r, i) in enumerate(mono):
                atoms = list(mono)
                atoms[pos] = (g, r + 1, i)
                sign, new = sort_monomial(self.system, atoms)
                if sign:
                    put((l, new), c * sign)
        return Field(self.system, acc)

    def dilate(self, k: int) -> "Field":
        """F(eps^k z) as a field in z."""
        k %= self.system.num_points
        if not k:
            return self
        sysm = self.system
        acc: dict = {}
        for (l, mono), c in self.terms.items():
            coef = c * sysm.eps_power(k * l)
            atoms = []
            for g, r, i in mono:
                f, atom = canon_atom(sysm, g, r, i + k)
                coef = coef * f * sysm.eps_power(-k * r)
                atoms.append(atom)
            sign, new = sort_monomial(sysm, atoms)
            if sign:
                key = (l, new)
                cur = acc.get(key)
                val = coef * sign
                acc[key] = val if cur is None else cur + val
        return Field(sysm, acc)

    def nomul(self, other: "Field") -> "Field":
        """Full free-field normal ordered product (supercommutative, bilinear)."""
        self._check(other)
        acc: dict = {}
        for (l1, m1), c1 in self.terms.items():
            for (l2, m2), c2 in other.terms.items():
                sign, mono = sort_monomial(self.system, m1 + m2)
                if not sign:
                    continue
                key = (l1 + l2, mono)
                val = c1 * c2 if sign == 1 else -(c1 * c2)
                cur = acc.get(key)
                acc[key] = val if cur is None else cur + val
        return Field(self.system, acc)

    def taylor(self, t: int, j: int) -> "Field":
        """(1/t!) d^t F at z = eps^j w, written as a field in w."""
        out = self.derivative(t)
        if t > 1:
            out = out * as_scalar(mpq(1, factorial(t)))
        return out.dilate(j)

    def substitute(self, images: Mapping, target: GeneratorSystem) -> "Field":
        """Apply a mode-level correspondence given by generator images.

        ``images[name]`` is the target Field image of the undilated generator;
        derivatives and dilations are transported, and full normal ordering is
        preserved because the correspondence matches creation with creation modes.
        """
        cache: dict = {}

        def image(atom):
            if atom not in cache:
                g, r, i = atom
                base = images[self.system.generators[g].name]
                cache[atom] = base.dilate_in(i, self.system.num_points).derivative(r)
            return cache[atom]

        out = Field(target)
        for (l, mono), c in self.terms.items():
            term = Field.identity(target, c, l)
            for atom in mono:
                term = term.nomul(image(atom))
            out = out + term
        return out

    def dilate_in(self, i: int, source_points: int) -> "Field":
        """F(zeta_{source_points}^i z) where the dilation root comes from another system."""
        if i % source_points == 0:
            return self
        n = self.system.num_points
        if n % source_points:
            raise ValueError("dilation root not available in target system")
        return self.dilate(i * (n // source_points))

    # text -------------------------------------------------------------------------

    def __str__(self):
        from .expr import format_field

        return format_field(self)

    def __repr__(self):
        return f"Field<{self.system.name}>({self})"
