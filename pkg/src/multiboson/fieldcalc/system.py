"""Generator systems: free fields, their mode lattices and contraction table."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional

from ..ratfunc import RatFunc
from ..scalars import Scalar, make_root

__all__ = ["Generator", "GeneratorSystem", "ContractionError"]


class ContractionError(KeyError):
    pass


@dataclass(frozen=True)
class Generator:
    """A free field G(z) = sum_n g_n z^-(power*n + offset).

    ``half_integer`` selects the label lattice Z + 1/2 instead of Z.  The
    annihilation part collects the modes whose raw power ``power*n + offset - 1``
    is nonnegative.  ``energy_shift`` is added to ``-n`` to get the energy of a
    creation mode, chosen so that conjugate modes carry opposite energies.
    """

    name: str
    parity: int = 0
    half_integer: bool = False
    power: int = 1
    offset: Fraction = Fraction(1)
    energy_shift: Fraction = Fraction(0)

    def exponent(self, n: Fraction) -> int:
        e = -(self.power * n + self.offset)
        if e.denominator != 1:
            raise ValueError(f"{self.name}: label {n} gives non-integer power")
        return int(e)

    def label_for_exponent(self, e: int) -> Optional[Fraction]:
        n = Fraction(-e - self.offset) / self.power
        lattice_ok = (n - Fraction(1, 2)).denominator == 1 if self.half_integer else n.denominator == 1
        return n if lattice_ok else None

    def on_lattice(self, n) -> bool:
        n = Fraction(n)
        return (n - Fraction(1, 2)).denominator == 1 if self.half_integer else n.denominator == 1

    def raw_power(self, n: Fraction) -> int:
        return -self.exponent(n) - 1

    def annihilates(self, n: Fraction) -> bool:
        return self.raw_power(n) >= 0

    def energy(self, n: Fraction) -> Fraction:
        return -Fraction(n) + self.energy_shift


@dataclass(eq=False)
class GeneratorSystem:
    """Free generators with N-point locality and a full contraction table.

    ``contractions[(a, b)]`` is the rational function of (z, w) whose i_{z,w}
    expansion is the contraction of generator a at z with generator b at w.
    ``mode_bracket(a, m, b, n)`` returns the exact supercommutator [a_m, b_n]
    of mode labels; it is kept separate from the contractions so the Fock
    oracle does not depend on the symbolic engine.  Brackets of modes are
    central and vanish unless the two labels add up to ``bracket_shift``.
    """

    name: str
    num_points: int
    generators: tuple
    contractions: dict
    mode_bracket: Callable = field(repr=False, default=None)
    ambient_order: int = 0
    bracket_shift: Fraction = Fraction(0)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self._index = {g.name: k for k, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise ValueError("duplicate generator names")
        if not self.ambient_order:
            self.ambient_order = _lcm(4, self.num_points)
        table = {}
        for (a, b), rf in self.contractions.items():
            table[(self.index(a), self.index(b))] = rf if isinstance(rf, RatFunc) else RatFunc.const(rf)
        self.contractions = table
        for rf in table.values():
            for q in rf.roots:
                if (q * self.num_points).denominator != 1:
                    raise ValueError(f"{self.name}: contraction pole at root({q}) is not a "
                                     f"{self.num_points}-th root of unity")

    @property
    def epsilon(self) -> Scalar:
        return make_root(self.num_points, 1)

    def eps_power(self, k: int) -> Scalar:
        return make_root(self.num_points, k)

    def index(self, name) -> int:
        if isinstance(name, int):
            return name
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"system {self.name} has no generator {name!r}") from None

    def generator(self, name) -> Generator:
        return self.generators[self.index(name)]

    def contraction(self, a, b) -> RatFunc:
        key = (self.index(a), self.index(b))
        try:
            return self.contractions[key]
        except KeyError:
            ga, gb = self.generators[key[0]].name, self.generators[key[1]].name
            raise ContractionError(f"no contraction declared for ({ga}, {gb}) in {self.name}") from None

    def dilation_period(self, g: int) -> int:
        """Dilation indices of generator g are defined modulo this period."""
        gen = self.generators[g]
        period = self.num_points // gcd(self.num_points, gen.power)
        if period != self.num_points and Fraction(gen.offset).denominator != 1:
            return self.num_points
        return period

    def check_symmetry(self) -> list[str]:
        """Pairs whose contractions violate R_ab(z, w) = (-1)^{p_a p_b} R_ba(w, z)."""
        bad = []
        for (a, b), rf in self.contractions.items():
            other = self.contractions.get((b, a))
            if other is None:
                bad.append(f"missing ({self.generators[b].name}, {self.generators[a].name})")
                continue
            sign = -1 if self.generators[a].parity and self.generators[b].parity else 1
            if rf != other.swap() * sign:
                bad.append(f"({self.generators[a].name}, {self.generators[b].name})")
        return bad


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
