"""Named generator systems, derived fields and the correspondences between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

from gmpy2 import mpq

from .fieldcalc import Field, Generator, GeneratorSystem, OpeResult, normal_product, ope
from .fieldcalc.wick import singular_part
from .ratfunc import RatFunc
from .scalars import I, ONE, ZERO, Scalar, as_scalar, make_root

__all__ = [
    "chi_system",
    "betagamma_system",
    "betagamma_squared_system",
    "symplectic_system",
    "symplectic_powered_system",
    "builtin_systems",
    "get_system",
    "derived_field",
    "DERIVED_NAMES",
    "substitute_power",
    "CorrespondenceMap",
    "phi_betagamma",
    "phi_sb",
    "ModeIndexing",
    "MODE_INDEXINGS",
    "VirasoroParams",
    "ope_from_terms",
]


def _q(x) -> Scalar:
    if isinstance(x, str):
        return as_scalar(Fraction(x))
    return as_scalar(x)


def _power_pole(d: int, c=ONE) -> RatFunc:
    """c / (z^d - w^d)."""
    return RatFunc({(0, 0): as_scalar(c)}, roots={Fraction(k, d): 1 for k in range(d)})


# mode brackets -------------------------------------------------------------------


def _chi_bracket(a, m, b, n) -> Scalar:
    m, n = Fraction(m), Fraction(n)
    if m + n != 0:
        return ZERO
    return ONE if int(m - Fraction(1, 2)) % 2 == 0 else -ONE


def _betagamma_bracket(a, m, b, n) -> Scalar:
    if Fraction(m) + Fraction(n) != 0:
        return ZERO
    if (a, b) == ("beta", "gamma"):
        return ONE
    if (a, b) == ("gamma", "beta"):
        return -ONE
    return ZERO


def _symplectic_j(a: int, b: int) -> int:
    """Block-diagonal symplectic form on indices 1..2n."""
    if a % 2 == 1 and b == a + 1:
        return 1
    if a % 2 == 0 and b == a - 1:
        return -1
    return 0


def _symplectic_bracket(a, m, b, n) -> Scalar:
    if Fraction(m) + Fraction(n) != 1:
        return ZERO
    return I * _symplectic_j(int(a[2:]), int(b[2:]))


# systems -------------------------------------------------------------------------


@lru_cache(maxsize=None)
def chi_system(num_points: int = 2) -> GeneratorSystem:
    """The twisted boson chi(z) = sum_{n in Z+1/2} chi_n z^(-n-1/2)."""
    if num_points < 2 or num_points % 2:
        raise ValueError("chi needs an even number of locality points")
    gen = Generator("chi", parity=0, half_integer=True, power=1, offset=Fraction(1, 2))
    name = "chi" if num_points == 2 else f"chi_N{num_points}"
    return GeneratorSystem(name, num_points, (gen,), {("chi", "chi"): RatFunc.pole(Fraction(1, 2))},
                           _chi_bracket)


def _betagamma(name: str, power: int) -> GeneratorSystem:
    beta = Generator("beta", power=power, offset=Fraction(power))
    gamma = Generator("gamma", power=power, offset=Fraction(0))
    zero = RatFunc({})
    table = {
        ("beta", "gamma"): _power_pole(power),
        ("gamma", "beta"): _power_pole(power, -1),
        ("beta", "beta"): zero,
        ("gamma", "gamma"): zero,
    }
    return GeneratorSystem(name, power, (beta, gamma), table, _betagamma_bracket)


@lru_cache(maxsize=None)
def betagamma_system() -> GeneratorSystem:
    """beta(z) = sum beta_n z^(-n-1), gamma(z) = sum gamma_n z^(-n), local at z = w."""
    return _betagamma("betagamma", 1)


@lru_cache(maxsize=None)
def betagamma_squared_system() -> GeneratorSystem:
    """beta(z^2), gamma(z^2) as a two-point local system."""
    return _betagamma("betagamma_squared", 2)


def _symplectic(name: str, n: int, power: int) -> GeneratorSystem:
    if n < 1:
        raise ValueError("n must be positive")
    names = [f"xi{a}" for a in range(1, 2 * n + 1)]
    gens = tuple(Generator(x, power=power, offset=Fraction(0), energy_shift=Fraction(1, 2)) for x in names)
    table = {}
    for a in range(1, 2 * n + 1):
        for b in range(1, 2 * n + 1):
            j = _symplectic_j(a, b)
            table[(names[a - 1], names[b - 1])] = _power_pole(power, I * j) if j else RatFunc({})
    return GeneratorSystem(name, power, gens, table, _symplectic_bracket, bracket_shift=Fraction(1))


@lru_cache(maxsize=None)
def symplectic_system(n: int = 1) -> GeneratorSystem:
    """Symplectic bosons xi^1..xi^2n with [xi^a_m, xi^b_k] = i J^ab delta_{m+k,1}."""
    return _symplectic("symplectic" if n == 1 else f"symplectic_n{n}", n, 1)


@lru_cache(maxsize=None)
def symplectic_powered_system(n: int = 1) -> GeneratorSystem:
    """xi^a(z^2n) for a = 1..2n, local at the 2n-th roots of unity."""
    return _symplectic(f"symplectic_powered_n{n}", n, 2 * n)


def builtin_systems(n: int = 2) -> dict[str, GeneratorSystem]:
    """The standard systems; ``n`` selects the 2n-point chi and powered symplectic systems."""
    out = {
        "chi": chi_system(2),
        "betagamma": betagamma_system(),
        "betagamma_squared": betagamma_squared_system(),
        "symplectic": symplectic_system(1),
    }
    chi_n = chi_system(2 * n)
    sp = symplectic_powered_system(n)
    out[chi_n.name] = chi_n
    out[sp.name] = sp
    out[symplectic_system(n).name] = symplectic_system(n)
    return out


def get_system(name: str) -> GeneratorSystem:
    """Look up a system by name, including ``chi_N<2n>``, ``symplectic_n<n>`` and ``symplectic_powered_n<n>``."""
    fixed = {
        "chi": lambda: chi_system(2),
        "betagamma": betagamma_system,
        "betagamma_squared": betagamma_squared_system,
        "symplectic": lambda: symplectic_system(1),
    }
    if name in fixed:
        return fixed[name]()
    for prefix, ctor in (("chi_N", chi_system), ("symplectic_powered_n", symplectic_powered_system),
                         ("symplectic_n", symplectic_system)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return ctor(int(name[len(prefix):]))
    raise KeyError(f"unknown system {name!r}")


# derived fields ------------------------------------------------------------------


def _gen(system, name, i=0) -> Field:
    return Field.generator(system, name, i)


def beta_chi() -> Field:
    s = chi_system(2)
    return (_gen(s, "chi") - _gen(s, "chi", 1)).shift(-1) * as_scalar(mpq(1, 2))


def gamma_chi() -> Field:
    s = chi_system(2)
    return (_gen(s, "chi") + _gen(s, "chi", 1)) * as_scalar(mpq(1, 2))


def h_chi_tw() -> Field:
    """1/2 :chi(z) chi(-z):"""
    s = chi_system(2)
    return normal_product(_gen(s, "chi"), _gen(s, "chi", 1)) * as_scalar(mpq(1, 2))


def h_chi_utw() -> Field:
    """(1/4z) (:chi(z) chi(z): - :chi(-z) chi(-z):)"""
    s = chi_system(2)
    a = normal_product(_gen(s, "chi"), _gen(s, "chi"))
    b = normal_product(_gen(s, "chi", 1), _gen(s, "chi", 1))
    return (a - b).shift(-1) * as_scalar(mpq(1, 4))


def h_bg_tw() -> Field:
    """1/2 :gamma gamma: - (z/2) :beta beta:"""
    s = betagamma_system()
    g, b = _gen(s, "gamma"), _gen(s, "beta")
    half = as_scalar(mpq(1, 2))
    return normal_product(g, g) * half - normal_product(b, b).shift(1) * half


def h_bg_utw() -> Field:
    """:beta gamma:"""
    s = betagamma_system()
    return normal_product(_gen(s, "beta"), _gen(s, "gamma"))


def L1(a=0, b=0) -> Field:
    a, b = _q(a), _q(b)
    h = h_bg_utw()
    s = h.system
    out = normal_product(h, h) * as_scalar(mpq(-1, 2)) + h.derivative() * a + h.shift(-1) * b
    return out + Field.identity(s, (a * b * 2 - b * b) * as_scalar(mpq(1, 2)), -2)


def L2(lam=0, mu=0) -> Field:
    lam, mu = _q(lam), _q(mu)
    s = betagamma_system()
    beta, gamma = _gen(s, "beta"), _gen(s, "gamma")
    out = normal_product(beta.derivative(), gamma) * lam
    out = out + normal_product(beta, gamma.derivative()) * (lam + 1)
    out = out + normal_product(beta, gamma).shift(-1) * mu
    const = ((lam * 2 + 1) * mu - mu * mu) * as_scalar(mpq(1, 2))
    return out + Field.identity(s, const, -2)


def _l3_from(h: Field, s: int, kappa) -> Field:
    """(-1/(2u) :h^2: + 1/(16u^2)) + kappa (h - kappa u / 2) with u = z^s."""
    kappa = _q(kappa)
    sysm = h.system
    out = normal_product(h, h).shift(-s) * as_scalar(mpq(-1, 2))
    out = out + Field.identity(sysm, as_scalar(mpq(1, 16)), -2 * s)
    return out + h * kappa - Field.identity(sysm, kappa * kappa * as_scalar(mpq(1, 2)), s)


def L3(kappa=0) -> Field:
    """The kappa family built on the twisted Heisenberg field of the betagamma system."""
    return _l3_from(h_bg_tw(), 1, kappa)


def L3_chi(kappa=0) -> Field:
    """The same family on the chi side, as a field of z standing for L(z^2)."""
    return _l3_from(h_chi_tw(), 2, kappa)


def solitary() -> Field:
    """-(1/8z^2) (:chi'(z) chi(-z): + :chi'(-z) chi(z):) - 1/(32 z^4), standing for L(z^2)."""
    s = chi_system(2)
    d0 = Field.atom(s, "chi", 1, 0)
    # chi'(-z) = -d/dz[chi(-z)]
    d1 = -Field.atom(s, "chi", 1, 1)
    body = normal_product(d0, _gen(s, "chi", 1)) + normal_product(d1, _gen(s, "chi"))
    return body.shift(-2) * as_scalar(mpq(-1, 8)) + Field.identity(s, as_scalar(mpq(-1, 32)), -4)


def xi_chi(a: int, n: int = 1) -> Field:
    """Preimage of xi^a(z^2n) inside the 2n-point chi system."""
    if not 1 <= a <= 2 * n:
        raise ValueError(f"index a={a} outside 1..{2 * n}")
    s = chi_system(2 * n)
    total = Field.zero(s)
    for k in range(2 * n):
        e = -k * a if a % 2 else k * a
        total = total + _gen(s, "chi", k) * s.eps_power(e)
    if a % 2:
        return total.shift(-a) * as_scalar(mpq(1, 2 * n))
    return total.shift(a - 2 * n) * (I * as_scalar(mpq(1, 2 * n)))


def _l_chi(builder: Callable) -> Callable:
    def make(*args):
        return phi_betagamma().inverse_image(substitute_power(builder(*args), 2))
    return make


DERIVED_NAMES = ("beta_chi", "gamma_chi", "h_chi_tw", "h_chi_utw", "h_bg_tw", "h_bg_utw", "L1", "L2",
                 "L3", "L1_chi", "L2_chi", "L3_chi", "solitary", "xi_chi_a")


def derived_field(name: str, **params) -> Field:
    """Named field with keyword parameters (a, b, lam, mu, kappa, index, n)."""
    simple = {"beta_chi": beta_chi, "gamma_chi": gamma_chi, "h_chi_tw": h_chi_tw, "h_chi_utw": h_chi_utw,
              "h_bg_tw": h_bg_tw, "h_bg_utw": h_bg_utw, "solitary": solitary}
    if name in simple:
        return simple[name]()
    if name == "L1":
        return L1(params.get("a", 0), params.get("b", 0))
    if name == "L2":
        return L2(params.get("lam", 0), params.get("mu", 0))
    if name == "L3":
        return L3(params.get("kappa", 0))
    if name == "L1_chi":
        return _l_chi(L1)(params.get("a", 0), params.get("b", 0))
    if name == "L2_chi":
        return _l_chi(L2)(params.get("lam", 0), params.get("mu", 0))
    if name == "L3_chi":
        return L3_chi(params.get("kappa", 0))
    if name == "xi_chi_a":
        return xi_chi(int(params.get("index", 1)), int(params.get("n", 1)))
    raise KeyError(f"unknown derived field {name!r}")


# change of variable u = z^s ------------------------------------------------------


def substitute_power(f: Field, s: int = 2) -> Field:
    """F(u) in betagamma  ->  F(z^s) in betagamma_squared (d/du = z^(1-s)/s d/dz)."""
    if f.system is not betagamma_system() or s != 2:
        raise ValueError("substitute_power maps betagamma fields to betagamma_squared with s = 2")
    target = betagamma_squared_system()
    inv_s = as_scalar(mpq(1, s))
    cache: dict = {}

    def atom_image(atom):
        if atom not in cache:
            g, r, _ = atom
            out = Field.generator(target, f.system.generators[g].name)
            for _ in range(r):
                out = out.derivative().shift(1 - s) * inv_s
            cache[atom] = out
        return cache[atom]

    total = Field.zero(target)
    for (l, mono), c in f.terms.items():
        term = Field.identity(target, c, s * l)
        for atom in mono:
            term = term.nomul(atom_image(atom))
        total = total + term
    return total


# correspondences -----------------------------------------------------------------


@dataclass
class CorrespondenceMap:
    """Generator-level bijection between two systems with the same locality points."""

    name: str
    source: GeneratorSystem
    target: GeneratorSystem
    images: dict  # source generator name -> Field in target
    inverse_images: dict  # target generator name -> Field in source
    vacuum_to_vacuum: bool = True

    def image(self, f: Field) -> Field:
        return f.substitute(self.images, self.target)

    def inverse_image(self, f: Field) -> Field:
        return f.substitute(self.inverse_images, self.source)

    def image_ope(self, res: OpeResult) -> OpeResult:
        return OpeResult(self.target, {k: self.image(v) for k, v in res.terms.items()})

    def round_trip_errors(self) -> list[str]:
        bad = []
        for g in self.source.generators:
            f = Field.generator(self.source, g.name)
            if self.inverse_image(self.image(f)) != f:
                bad.append(f"{self.source.name}:{g.name}")
        for g in self.target.generators:
            f = Field.generator(self.target, g.name)
            if self.image(self.inverse_image(f)) != f:
                bad.append(f"{self.target.name}:{g.name}")
        return bad


@lru_cache(maxsize=None)
def phi_betagamma() -> CorrespondenceMap:
    src, tgt = chi_system(2), betagamma_squared_system()
    beta, gamma = Field.generator(tgt, "beta"), Field.generator(tgt, "gamma")
    return CorrespondenceMap("phi_betagamma", src, tgt, {"chi": gamma + beta.shift(1)},
                             {"beta": beta_chi(), "gamma": gamma_chi()})


@lru_cache(maxsize=None)
def phi_sb(n: int = 1) -> CorrespondenceMap:
    src, tgt = chi_system(2 * n), symplectic_powered_system(n)
    img = Field.zero(tgt)
    for a in range(1, 2 * n + 1):
        xi = Field.generator(tgt, f"xi{a}")
        img = img + (xi.shift(a) if a % 2 else xi.shift(2 * n - a) * (-I))
    inv = {f"xi{a}": xi_chi(a, n) for a in range(1, 2 * n + 1)}
    return CorrespondenceMap(f"phi_sb_n{n}", src, tgt, {"chi": img}, inv)


# mode indexings ------------------------------------------------------------------


@dataclass(frozen=True)
class ModeIndexing:
    """Label n of a field's modes versus the raw power p in F(z) = sum_p F_(p) z^(-p-1).

    ``p = scale * n + shift`` on the label lattice ``Z + offset``.
    """

    field: str
    scale: Fraction
    shift: Fraction
    label_offset: Fraction = Fraction(0)

    def raw(self, n) -> int:
        n = Fraction(n)
        if (n - self.label_offset).denominator != 1:
            raise ValueError(f"{self.field}: label {n} is off the lattice Z+{self.label_offset}")
        p = self.scale * n + self.shift
        if p.denominator != 1:
            raise ValueError(f"{self.field}: label {n} has no integer raw power")
        return int(p)

    def label(self, p: int) -> Fraction:
        return (Fraction(p) - self.shift) / self.scale

    def labels(self, bound) -> list[Fraction]:
        """All labels with |n| <= bound."""
        bound = Fraction(bound)
        k = -int(bound) - 1
        out = []
        while k + self.label_offset <= bound:
            n = k + self.label_offset
            if abs(n) <= bound:
                out.append(n)
            k += 1
        return out


HALF = Fraction(1, 2)
MODE_INDEXINGS = {
    "h_chi_tw": ModeIndexing("h_chi_tw", Fraction(2), Fraction(0), HALF),
    "h_chi_utw": ModeIndexing("h_chi_utw", Fraction(2), Fraction(1)),
    "h_bg_tw": ModeIndexing("h_bg_tw", Fraction(1), -HALF, HALF),
    "h_bg_utw": ModeIndexing("h_bg_utw", Fraction(1), Fraction(0)),
    "L": ModeIndexing("L", Fraction(1), Fraction(1)),
}


@dataclass(frozen=True)
class VirasoroParams:
    family: str  # L1, L2, L3, solitary
    params: tuple = ()

    def expected_central_charge(self) -> Scalar:
        p = dict(self.params)
        if self.family == "L1":
            a = _q(p.get("a", 0))
            return a * a * 12 + 1
        if self.family == "L2":
            lam = _q(p.get("lam", 0))
            return (lam * 2 + 1) * (lam * 2 + 1) * 3 - 1
        if self.family == "L3":
            return ONE
        if self.family == "solitary":
            return -ONE
        raise KeyError(f"unknown Virasoro family {self.family!r}")


def ope_from_terms(system: GeneratorSystem, terms) -> OpeResult:
    """Singular part of sum_k f_k(z, w) * F_k(w) for RatFuncs f_k and fields F_k of w."""
    groups: dict = {}
    for rf, fld in terms:
        for (l, mono), c in fld.terms.items():
            key = ((), mono)
            val = rf * RatFunc.monomial(c, 0, l)
            groups[key] = groups[key] + val if key in groups else val
    groups = {k: v for k, v in groups.items() if not v.is_zero()}
    return OpeResult(system, singular_part(system, groups))


# checks ----------------------------------------------------------------------------


def _pole_power(s: int, order: int) -> RatFunc:
    """1/(z^s - w^s)^order."""
    return RatFunc({(0, 0): ONE}, roots={Fraction(j, s): order for j in range(s)})


_FAMILY_SIDE = {"L1": 1, "L2": 1, "L3": 1, "L1_chi": 2, "L2_chi": 2, "L3_chi": 2, "solitary": 2}
_FAMILY_PARAMS = {"L1": ("a", "b"), "L2": ("lam", "mu"), "L3": ("kappa",), "solitary": ()}


@dataclass
class VirasoroReport:
    family: str
    params: dict
    matches: bool
    central_charge: Scalar | None
    expected_central_charge: Scalar
    third_order_pole_vanishes: bool
    computed: OpeResult
    expected: OpeResult | None
    residual: dict = field(default_factory=dict)  # (j, k) -> Field, computed minus expected

    @property
    def ok(self) -> bool:
        return self.matches and self.third_order_pole_vanishes and self.central_charge == self.expected_central_charge


def virasoro_target(L: Field, s: int, c_half) -> OpeResult:
    """C/2/(u-v)^4 + 2L/(u-v)^2 + dL/du/(u-v) with u = z^s, as an OPE in z and w."""
    sysm = L.system
    c_half = as_scalar(c_half)
    if s == 1:
        dl = L.derivative()
    else:
        dl = L.derivative().shift(1 - s) * as_scalar(mpq(1, s))
    return ope_from_terms(sysm, [(_pole_power(s, 4), Field.identity(sysm, c_half)),
                                 (_pole_power(s, 2), L * 2), (_pole_power(s, 1), dl)])


def virasoro_check(family: str, params: Mapping | None = None) -> VirasoroReport:
    """Compute ope(L, L) and compare it with the Virasoro shape; read off the central charge.

    ``family`` is one of L1, L2, L3 (betagamma side), L1_chi, L2_chi, L3_chi or
    solitary (chi side, fields standing for L(z^2)).
    """
    if family not in _FAMILY_SIDE:
        raise KeyError(f"unknown Virasoro family {family!r}")
    params = dict(params or {})
    base = family.removesuffix("_chi")
    allowed = _FAMILY_PARAMS[base]
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"family {family} takes parameters {allowed}, got {sorted(extra)}")
    L = derived_field(family, **params)
    s = _FAMILY_SIDE[family]
    res = ope(L, L)
    # the identity coefficient of 1/(z-w)^4 is C/2 (s = 1) or C/2 / (s w^(s-1))^4 (s = 2)
    top = res.coefficient(0, 3).identity_part()
    key = -4 * (s - 1)
    c_half = top.get(key)
    expected_c = VirasoroParams(base, tuple(sorted(params.items()))).expected_central_charge()
    if c_half is None:
        return VirasoroReport(family, params, False, None, expected_c, res.coefficient(0, 2).is_zero(), res, None,
                              dict(res.terms))
    c_half = c_half * s ** 4
    want = virasoro_target(L, s, c_half)
    residual = {}
    for k in sorted(set(res.terms) | set(want.terms)):
        d = res.coefficient(*k) - want.coefficient(*k)
        if not d.is_zero():
            residual[k] = d
    third = (res.coefficient(0, 2) - want.coefficient(0, 2)).is_zero()
    return VirasoroReport(family, params, not residual, c_half * 2, expected_c, third, res, want, residual)


def interpolate_central_charge(family: str, param: str, values, fixed: Mapping | None = None) -> list[Fraction]:
    """Coefficients (constant first) of the polynomial through (x, c(x)) for the given values."""
    pts = []
    for x in values:
        p = dict(fixed or {})
        p[param] = x
        rep = virasoro_check(family, p)
        if rep.central_charge is None or not rep.central_charge.is_rational():
            raise ValueError(f"no rational central charge at {param}={x}")
        pts.append((Fraction(x), Fraction(int(rep.central_charge.to_rational().numerator),
                                          int(rep.central_charge.to_rational().denominator))))
    coeffs = [Fraction(0)] * len(pts)
    for i, (xi, yi) in enumerate(pts):
        # Lagrange basis polynomial for xi, expanded
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(pts):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, b in enumerate(basis):
            coeffs[k] += yi * b / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def l3_third_pole(nu, kappa=0) -> Field:
    """Coefficient of 1/(z-w)^3 in the OPE of L3(kappa) + nu dh with itself."""
    L = L3(kappa) + h_bg_tw().derivative() * _q(nu)
    return ope(L, L).coefficient(0, 2)


@dataclass
class PairCheck:
    left: str
    right: str
    ok: bool
    computed: OpeResult
    expected: OpeResult


@dataclass
class HomomorphismReport:
    map_name: str
    pairs: list

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.pairs)


def check_homomorphism(cmap: CorrespondenceMap, pairs=None) -> HomomorphismReport:
    """ope(map(x), map(y)) in the target against the image of ope(x, y), for source generators."""
    names = [g.name for g in cmap.source.generators]
    if pairs is None:
        pairs = [(x, y) for x in names for y in names]
    out = []
    for x, y in pairs:
        fx, fy = Field.generator(cmap.source, x), Field.generator(cmap.source, y)
        got = ope(cmap.image(fx), cmap.image(fy))
        want = cmap.image_ope(ope(fx, fy))
        out.append(PairCheck(x, y, got == want, got, want))
    return HomomorphismReport(cmap.name, out)


@dataclass
class IdentificationReport:
    lam: Scalar
    mu: Scalar
    equal: bool
    solitary: Field
    image: Field
    difference: Field


def solitary_identification(lam=Fraction(-1, 2), mu=Fraction(1, 4)) -> IdentificationReport:
    """Compare the solitary field with the chi-side image of L2(lam, mu) at u = z^2."""
    lam, mu = _q(lam), _q(mu)
    img = _l_chi(L2)(lam, mu)
    sol = solitary()
    diff = sol - img
    return IdentificationReport(lam, mu, diff.is_zero(), sol, img, diff)


HEISENBERG = {
    "chi-twisted": ("h_chi_tw", RatFunc({(2, 0): _q("-1/2"), (0, 2): _q("-1/2")},
                                        roots={Fraction(0): 2, Fraction(1, 2): 2})),
    "chi-untwisted": ("h_chi_utw", RatFunc({(0, 0): -ONE}, roots={Fraction(0): 2, Fraction(1, 2): 2})),
    "bg-twisted": ("h_bg_tw", RatFunc({(1, 0): _q("-1/2"), (0, 1): _q("-1/2")}, roots={Fraction(0): 2})),
}


@dataclass
class ModeBracket:
    m: Fraction
    n: Fraction
    value: Scalar | None
    expected: Scalar
    window: int
    stable: bool

    @property
    def ok(self) -> bool:
        return self.value == self.expected and self.stable


@dataclass
class HeisenbergReport:
    which: str
    field_name: str
    ope_matches: bool
    computed: RatFunc
    expected: RatFunc
    non_central: dict
    brackets: list

    @property
    def ok(self) -> bool:
        return self.ope_matches and not self.non_central and all(b.ok for b in self.brackets)


def heisenberg_check(which: str, energy_cutoff=6, particle_cutoff: int | None = 6, bound=3,
                     stability_grow: int = 2, pairs: str = "diagonal") -> HeisenbergReport:
    """Symbolic OPE against the displayed rational function, plus Fock brackets [h_m, h_n] = -m delta.

    ``pairs`` is "diagonal" (n = -m only) or "all" (every pair of labels with
    |m|, |n| <= bound).  Particle cutoffs apply to systems with zero-energy
    modes only; chi needs none.  Set ``stability_grow`` to 0 to skip the
    re-check at larger cutoffs.
    """
    from .fockspace import ModeOperator, WindowError, bracket, build_space

    if which not in HEISENBERG:
        raise KeyError(f"unknown Heisenberg check {which!r}; choose from {sorted(HEISENBERG)}")
    name, expected = HEISENBERG[which]
    h = derived_field(name)
    res = ope(h, h)
    computed = res.central()
    idx = MODE_INDEXINGS[name]
    labels = idx.labels(bound)
    if pairs == "diagonal":
        todo = [(m, -m) for m in labels]
    else:
        todo = [(m, n) for m in labels for n in labels]
    system = h.system
    pc = particle_cutoff if system.name != chi_system(2).name else None
    spaces = [build_space(system, energy_cutoff, pc)]
    if stability_grow:
        spaces.append(build_space(system, Fraction(energy_cutoff) + stability_grow,
                                  None if pc is None else pc + stability_grow))
    ops = [dict() for _ in spaces]

    def op(level, p):
        if p not in ops[level]:
            ops[level][p] = ModeOperator(h, p, spaces[level])
        return ops[level][p]

    out = []
    for m, n in todo:
        want = as_scalar(mpq(-m.numerator, m.denominator)) if m + n == 0 else ZERO
        values = []
        window = 0
        for level in range(len(spaces)):
            try:
                br = bracket(op(level, idx.raw(m)), op(level, idx.raw(n)))
            except WindowError:
                values.append(None)
                continue
            values.append(br.scalar)
            if level == 0:
                window = len(br.window)
        stable = all(v == values[0] for v in values)
        out.append(ModeBracket(m, n, values[0], want, window, stable))
    return HeisenbergReport(which, name, computed == expected, computed, expected, res.non_central(), out)


@dataclass
class DictionaryReport:
    """[beta_m, gamma_n] computed with the chi-side images against the betagamma oracle."""

    rows: list  # (left, m, right, n, chi value, betagamma value, expected)

    @property
    def ok(self) -> bool:
        return all(r[4] == r[5] == r[6] for r in self.rows)


def mode_dictionary_check(bound: int = 3, energy_cutoff=6, particle_cutoff: int = 4) -> DictionaryReport:
    """beta(u) = sum beta_n u^(-n-1), gamma(u) = sum gamma_n u^(-n) read at u = z^2 inside chi.

    beta_chi has raw powers 2n + 1 and gamma_chi has 2n - 1; the same brackets
    are computed in the betagamma Fock space with raw powers n and n - 1.
    """
    from .fockspace import ModeOperator, WindowError, bracket, build_space

    chi_space = build_space(chi_system(2), energy_cutoff)
    bg = betagamma_system()
    bg_space = build_space(bg, energy_cutoff, particle_cutoff)
    chi_fields = {"beta": (beta_chi(), lambda n: 2 * n + 1), "gamma": (gamma_chi(), lambda n: 2 * n - 1)}
    bg_fields = {"beta": (Field.generator(bg, "beta"), lambda n: n), "gamma": (Field.generator(bg, "gamma"),
                                                                              lambda n: n - 1)}

    def value(fields, space, x, m, y, n):
        (fa, ra), (fb, rb) = fields[x], fields[y]
        try:
            return bracket(ModeOperator(fa, ra(m), space), ModeOperator(fb, rb(n), space)).scalar
        except WindowError:
            return None

    rows = []
    for x, y in (("beta", "gamma"), ("gamma", "beta"), ("beta", "beta"), ("gamma", "gamma")):
        for m in range(-bound, bound + 1):
            for n in range(-bound, bound + 1):
                if x == "beta" and y == "gamma":
                    want = ONE if m + n == 0 else ZERO
                elif x == "gamma" and y == "beta":
                    want = -ONE if m + n == 0 else ZERO
                else:
                    want = ZERO
                rows.append((x, m, y, n, value(chi_fields, chi_space, x, m, y, n),
                             value(bg_fields, bg_space, x, m, y, n), want))
    return DictionaryReport(rows)


@dataclass
class ModeAlgebraReport:
    """Brackets of labelled modes against expected values; rows are (m, n, ok, note)."""

    name: str
    rows: list

    @property
    def ok(self) -> bool:
        return bool(self.rows) and all(r[2] for r in self.rows)


def chi_mode_check(bound=Fraction(7, 2), energy_cutoff=6, stability_cutoff=8) -> ModeAlgebraReport:
    """[chi_m, chi_n] = (-1)^(m-1/2) delta_{m,-n} with chi(z) = sum chi_n z^(-n-1/2)."""
    from .fockspace import ModeOperator, WindowError, bracket, build_space

    s = chi_system(2)
    chi = Field.generator(s, "chi")
    spaces = [build_space(s, energy_cutoff)]
    if stability_cutoff is not None:
        spaces.append(build_space(s, stability_cutoff))
    labels = ModeIndexing("chi", Fraction(1), -HALF, HALF).labels(bound)
    ops = [{n: ModeOperator(chi, int(n - HALF), sp) for n in labels} for sp in spaces]
    rows = []
    for m in labels:
        for n in labels:
            want = (ONE if int(m - HALF) % 2 == 0 else -ONE) if m + n == 0 else ZERO
            vals = []
            for level in range(len(spaces)):
                try:
                    vals.append(bracket(ops[level][m], ops[level][n]).scalar)
                except WindowError:
                    vals.append(None)
            ok = all(v == want for v in vals)
            rows.append((m, n, ok, f"expected {want}, got {vals[0]}"))
    return ModeAlgebraReport("chi", rows)


def virasoro_mode_check(kappa=0, bound: int = 2, energy_cutoff=6, particle_cutoff: int = 4) -> ModeAlgebraReport:
    """[L_m, L_n] = (m-n) L_{m+n} + (m^3-m)/12 c delta_{m,-n} for L3(kappa) in betagamma, c = 1.

    L(z) = sum L_n z^(-n-2), so L_n is the raw mode n + 1.  Columns are compared on
    the exactness window of each bracket, energy component by energy component
    up to the cutoff.
    """
    from .fockspace import ModeOperator, WindowError, bracket, build_space

    L = L3(kappa)
    space = build_space(L.system, energy_cutoff, particle_cutoff)
    idx = MODE_INDEXINGS["L"]
    ops: dict = {}

    def op(n):
        if n not in ops:
            ops[n] = ModeOperator(L, idx.raw(n), space)
        return ops[n]

    rows = []
    for m in range(-bound, bound + 1):
        for n in range(-bound, bound + 1):
            try:
                br = bracket(op(m), op(n), upto_cutoff=True)
            except WindowError as exc:
                rows.append((m, n, False, str(exc)))
                continue
            target = op(m + n)
            central = as_scalar(mpq(m ** 3 - m, 12)) if m + n == 0 else ZERO
            bad = 0
            for k in br.window:
                img = target.apply_upto({space.basis[k]: 1}, space.energy_cutoff)
                want = {t: as_scalar(v) * (m - n) for t, v in img.items()
                        if space.energy(t) <= space.energy_cutoff} if m != n else {}
                if central:
                    st = space.basis[k]
                    want[st] = want.get(st, ZERO) + central
                want = {t: v for t, v in want.items() if not v.is_zero()}
                if want != br.columns[k]:
                    bad += 1
            rows.append((m, n, bad == 0, f"{len(br.window)} columns, {bad} differ"))
    return ModeAlgebraReport(f"L3(kappa={kappa})", rows)
