"""Exact truncated Fock spaces and raw-mode operators.

A basis state is a finite multiset of creation modes applied to the vacuum,
stored as a sorted tuple of ``(generator index, exponent)`` pairs, where the
exponent e = -(s n + o) is the power of z multiplying the mode.  Operators are
evaluated column by column in the full (untruncated) space, so every column
is exact; a column whose image leaves the truncated basis is marked as
overflowing and is excluded from the exactness window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Iterable, Optional

from .fieldcalc import Field, GeneratorSystem, ope
from .scalars import ONE, ZERO, Scalar, as_scalar, format_scalar, make_root

__all__ = [
    "FockSizeError",
    "WindowError",
    "TruncatedFock",
    "ModeOperator",
    "BracketResult",
    "build_space",
    "raw_mode",
    "bracket",
    "bracket_vs_ope",
    "predicted_bracket",
    "stable_bracket",
    "DEFAULT_SIZE_BOUND",
]

DEFAULT_SIZE_BOUND = 200_000

State = tuple  # sorted tuple of (g, e): generator index and the mode's z-exponent
Vector = dict  # {State: Scalar}


class FockSizeError(ValueError):
    """The requested cutoffs produce more basis states than the configured bound."""


class WindowError(ValueError):
    """No basis column is free of truncation effects."""


@lru_cache(maxsize=None)
def _label(system: GeneratorSystem, g: int, e: int) -> Fraction:
    return system.generators[g].label_for_exponent(e)


@lru_cache(maxsize=1 << 20)
def _state_energy(system: GeneratorSystem, state: State) -> Fraction:
    return sum((system.generators[g].energy(_label(system, g, e)) for g, e in state), Fraction(0))


@lru_cache(maxsize=None)
def _graded(system: GeneratorSystem) -> bool:
    """Whether removing a mode changes energy by the same affine rule as creating one.

    Holds when every generator pair satisfies shift(g) + shift(h) = bracket_shift,
    which makes each field term shift energy by a fixed amount.
    """
    gens = system.generators
    return all(g.energy_shift + h.energy_shift == system.bracket_shift for g in gens for h in gens)


@lru_cache(maxsize=None)
def _is_creator(system: GeneratorSystem, g: int, e: int) -> bool:
    label = system.generators[g].label_for_exponent(e)
    return label is not None and not system.generators[g].annihilates(label)


@lru_cache(maxsize=None)
def _conjugate(system: GeneratorSystem, g: int, h: int, e_h: int):
    """(exponent of the annihilator g_n pairing with mode (h, e_h), bracket value) or None."""
    gen = system.generators[g]
    label = system.bracket_shift - _label(system, h, e_h)
    if not gen.on_lattice(label) or not gen.annihilates(label):
        return None
    val = system.mode_bracket(gen.name, label, system.generators[h].name, _label(system, h, e_h))
    if val.is_zero():
        return None
    return gen.exponent(label), _fast(val)


@lru_cache(maxsize=None)
def _mode_coeff(system: GeneratorSystem, i: int, e: int, r: int):
    """Coefficient of the mode with z-exponent e inside d^r[g(eps^i z)], times z^-(e-r)."""
    ff = 1
    for k in range(r):
        ff *= e - k
    if ff == 0:
        return 0
    return _fast(make_root(system.num_points, i * e) * ff)


def _fast(c: Scalar):
    """Rational scalars become plain mpq values, which multiply much faster."""
    return c.to_rational() if c.is_rational() else c


def _norm(c) -> Scalar:
    return c if isinstance(c, Scalar) else as_scalar(c)


def _norm_vec(vec: Vector) -> Vector:
    return {k: _norm(v) for k, v in vec.items()}


def _add(vec: Vector, state: State, c):
    cur = vec.get(state)
    val = c if cur is None else cur + c
    if not val:
        vec.pop(state, None)
    else:
        vec[state] = val


# basis ---------------------------------------------------------------------------


def _creation_labels(system: GeneratorSystem, g: int, max_energy: Fraction) -> list[Fraction]:
    """Creation labels of generator g with energy <= max_energy, in increasing energy."""
    gen = system.generators[g]
    off = Fraction(1, 2) if gen.half_integer else Fraction(0)
    # largest creation label: raw power s n + o - 1 < 0
    top = Fraction(1 - gen.offset, gen.power)
    n = Fraction(floor(top - off)) + off
    if n >= top:
        n -= 1
    out = []
    while gen.energy(n) <= max_energy:
        out.append(n)
        n -= 1
    return out


@dataclass
class TruncatedFock:
    system: GeneratorSystem
    energy_cutoff: Fraction
    particle_cutoff: Optional[int]
    basis: list
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self.index = {s: k for k, s in enumerate(self.basis)}
        self.energies = [self.energy(s) for s in self.basis]

    def __len__(self):
        return len(self.basis)

    def energy(self, state: State) -> Fraction:
        return _state_energy(self.system, state)

    def describe(self, state: State) -> str:
        if not state:
            return "|0>"
        parts = [f"{self.system.generators[g].name}_{_label(self.system, g, e)}" for g, e in state]
        return " ".join(parts) + " |0>"

    @property
    def vacuum(self) -> State:
        return ()


def build_space(system: GeneratorSystem, energy_cutoff, particle_cutoff: Optional[int] = None,
                size_bound: int = DEFAULT_SIZE_BOUND) -> TruncatedFock:
    """All creation-mode multisets with energy <= E and at most P particles.

    Order: by energy, then particle number, then the sorted mode tuple.
    """
    E = Fraction(energy_cutoff)
    if E < 0:
        raise ValueError("energy cutoff must be nonnegative")
    if particle_cutoff is not None and particle_cutoff < 1:
        raise ValueError("particle cutoff must be at least 1")
    modes = []
    for g in range(len(system.generators)):
        for n in _creation_labels(system, g, E):
            gen = system.generators[g]
            modes.append(((g, gen.exponent(n)), gen.energy(n), bool(gen.parity)))
    if particle_cutoff is None and any(en <= 0 for _, en, _ in modes):
        raise FockSizeError("zero-energy creation modes need a finite particle cutoff")
    modes.sort(key=lambda m: m[0])
    states = []

    def rec(start: int, current: list, energy: Fraction):
        if len(states) > size_bound:
            raise FockSizeError(f"basis exceeds the size bound {size_bound}")
        states.append((energy, len(current), tuple(current)))
        if particle_cutoff is not None and len(current) >= particle_cutoff:
            return
        for k in range(start, len(modes)):
            mode, en, odd = modes[k]
            if energy + en > E:
                continue
            current.append(mode)
            rec(k + 1 if odd else k, current, energy + en)
            current.pop()

    rec(0, [], Fraction(0))
    states.sort()
    return TruncatedFock(system, E, particle_cutoff, [s for _, _, s in states])


# mode actions ----------------------------------------------------------------------


def _insert(system: GeneratorSystem, state: State, mode) -> tuple[int, State]:
    """Apply a creation mode; returns (sign, new state) with sign 0 for a Pauli zero."""
    odd = system.generators[mode[0]].parity
    pos = 0
    passed = 0
    while pos < len(state) and state[pos] < mode:
        passed += system.generators[state[pos][0]].parity
        pos += 1
    if odd and pos < len(state) and state[pos] == mode:
        return 0, state
    sign = -1 if odd and passed % 2 else 1
    return sign, state[:pos] + (mode,) + state[pos:]


@lru_cache(maxsize=1 << 18)
def _annihilate(system: GeneratorSystem, g: int, state: State) -> tuple:
    """All ways an annihilation mode of g removes a mode of the state: (exponent, value, rest)."""
    out = []
    odd = system.generators[g].parity
    passed = 0
    for pos, (h, e_h) in enumerate(state):
        hit = _conjugate(system, g, h, e_h)
        if hit is not None:
            e, val = hit
            if odd and passed % 2:
                val = -val
            out.append((e, val, state[:pos] + state[pos + 1:]))
        passed += system.generators[h].parity
    return tuple(out)


class _TermAction:
    """Raw mode of one term c z^l :atoms: of a canonical field."""

    def __init__(self, system: GeneratorSystem, l: int, atoms: tuple, coeff: Scalar):
        self.system = system
        self.l = l
        self.atoms = atoms
        coeff = _fast(coeff)
        self.coeff = coeff
        self.odd = [bool(system.generators[a[0]].parity) for a in atoms]
        self.bosonic = not any(self.odd)
        self._combos: dict = {}
        k = len(atoms)
        self.splits = []
        for mask in range(1 << k):
            ann = [j for j in range(k) if mask >> j & 1]
            cre = [j for j in range(k) if not mask >> j & 1]
            sign = 1
            if any(self.odd):
                order = cre + ann
                inv = sum(1 for x in range(k) for y in range(x + 1, k)
                          if self.odd[order[x]] and self.odd[order[y]] and order[y] < order[x])
                sign = -1 if inv % 2 else 1
            self.splits.append((ann, cre, coeff if sign == 1 else -coeff))

    def energy_shift(self, p: int) -> Optional[Fraction]:
        """Energy change caused by the raw mode p of this term, or None when it is not fixed."""
        if not self.atoms:
            return Fraction(0)
        gens = [self.system.generators[g] for g, _, _ in self.atoms]
        if not _graded(self.system) or len({g.power for g in gens}) > 1:
            return None
        total = -p - 1 - self.l + sum(r for _, r, _ in self.atoms) + sum(g.offset for g in gens)
        return Fraction(total) / gens[0].power + sum(g.energy_shift for g in gens)

    def apply(self, target: int, state: State, out: Vector):
        """Accumulate c * [coefficient of z^target in z^l :atoms:] |state> into out."""
        system = self.system
        for ann, cre, base in self.splits:
            # annihilators act first, rightmost first
            partial = [(base, state, 0)]
            for j in reversed(ann):
                g, r, i = self.atoms[j]
                nxt = []
                for c, st, zsum in partial:
                    for e, val, rest in _annihilate(system, g, st):
                        f = _mode_coeff(system, i, e, r)
                        if f:
                            nxt.append((c * f * val, rest, zsum + e - r))
                partial = nxt
                if not partial:
                    break
            for c, st, zsum in partial:
                need = target - self.l - zsum
                if not self.bosonic:
                    self._create(cre, 0, need, c, st, out)
                    continue
                for f, modes in self._creations(tuple(cre), need):
                    _add(out, tuple(sorted(st + modes)) if st else modes, c * f)

    def _creations(self, cre: tuple, need: int) -> list:
        """Sorted creation-mode tuples (with coefficients) for the given creator atoms."""
        key = (cre, need)
        hit = self._combos.get(key)
        if hit is None:
            acc: Vector = {}
            self._create(list(cre), 0, need, 1, (), acc)
            hit = list(acc.items())
            hit = [(c, st) for st, c in hit]
            self._combos[key] = hit
        return hit

    def _create(self, cre: list, pos: int, need: int, c: Scalar, st: State, out: Vector):
        if pos == len(cre):
            if need == 0:
                _add(out, st, c)
            return
        if need < 0:
            return
        g, r, i = self.atoms[cre[pos]]
        # creation modes have exponent e >= 0 and contribute z^(e - r) with e >= r
        for power in range(0, need + 1):
            e = power + r
            if not _is_creator(self.system, g, e):
                continue
            f = _mode_coeff(self.system, i, e, r)
            if not f:
                continue
            sign, new = _insert(self.system, st, (g, e))
            if sign == 0:
                continue
            self._create(cre, pos + 1, need - power, c * f * sign, new, out)


class ModeOperator:
    """Raw mode F_(p) of a canonical field, F(z) = sum_p F_(p) z^(-p-1), on a truncated space."""

    def __init__(self, fld: Field, p: int, space: TruncatedFock):
        if fld.system is not space.system:
            raise ValueError("field and Fock space use different systems")
        self.field = fld
        self.p = p
        self.space = space
        self.parity = fld.parity()
        self._terms = [_TermAction(fld.system, l, mono, c) for (l, mono), c in sorted(fld.terms.items())]
        groups: dict = {}
        for term in self._terms:
            groups.setdefault(term.energy_shift(p), []).append(term)
        # energy shift -> terms; the key None collects terms without a fixed shift
        self._groups = groups
        self.energy_shifts = frozenset(k for k in groups if k is not None)
        self.graded = None not in groups
        self._cache: dict = {}
        self._gcache: dict = {}
        self._raw_cols = None
        self._columns = None
        self._window = None

    @property
    def _raw(self) -> list[Vector]:
        if self._raw_cols is None:
            self._raw_cols = [self.apply_state(s) for s in self.space.basis]
        return self._raw_cols

    @property
    def window(self) -> frozenset:
        """Columns whose exact image lies inside the truncated basis."""
        if self._window is None:
            index = self.space.index
            self._window = frozenset(k for k, col in enumerate(self._raw) if all(s in index for s in col))
        return self._window

    @property
    def energy_shift(self) -> Optional[Fraction]:
        """The common energy change of all terms, if there is one."""
        if self.graded and len(self.energy_shifts) == 1:
            return next(iter(self.energy_shifts))
        return Fraction(0) if not self._groups else None

    @property
    def columns(self) -> list[Vector]:
        """Exact image of every basis state, with Scalar entries."""
        if self._columns is None:
            self._columns = [_norm_vec(col) for col in self._raw]
        return self._columns

    def apply_state(self, state: State) -> Vector:
        """Exact image of a basis state (not truncated)."""
        hit = self._cache.get(state)
        if hit is None:
            hit = {}
            for term in self._terms:
                term.apply(-self.p - 1, state, hit)
            self._cache[state] = hit
        return hit

    def apply(self, vec: Vector) -> Vector:
        out: Vector = {}
        for s, c in vec.items():
            for t, v in self.apply_state(s).items():
                _add(out, t, c * v)
        return out

    def _apply_group(self, state: State, key) -> Vector:
        hit = self._gcache.get((state, key))
        if hit is None:
            hit = {}
            for term in self._groups[key]:
                term.apply(-self.p - 1, state, hit)
            self._gcache[(state, key)] = hit
        return hit

    def apply_upto(self, vec: Vector, max_energy: Fraction) -> Vector:
        """Image of vec with only the energy components <= max_energy guaranteed complete.

        Term groups whose output would lie above max_energy are skipped; callers
        discard the states above max_energy afterwards.
        """
        out: Vector = {}
        system = self.space.system
        for s, c in vec.items():
            es = _state_energy(system, s)
            for key in self._groups:
                if key is not None and es + key > max_energy:
                    continue
                for t, v in self._apply_group(s, key).items():
                    _add(out, t, c * v)
        return out

    def triples(self) -> list[tuple[int, int, str]]:
        """(row, col, scalar text) for the in-space entries, sorted."""
        out = []
        for col, vec in enumerate(self.columns):
            for s, v in vec.items():
                row = self.space.index.get(s)
                if row is not None:
                    out.append((row, col, format_scalar(v)))
        return sorted(out)


def raw_mode(fld: Field, p: int, space: TruncatedFock) -> ModeOperator:
    op = ModeOperator(fld, p, space)
    if not op.window and len(space):
        ok = [q for q in range(p - 12, p + 13) if _vacuum_fits(fld, q, space)]
        hint = f"; raw powers with an exact vacuum column nearby: {ok}" if ok else ""
        raise WindowError(f"raw mode p={p} has an empty exactness window at E={space.energy_cutoff}, "
                          f"P={space.particle_cutoff}{hint}")
    return op


def _vacuum_fits(fld: Field, p: int, space: TruncatedFock) -> bool:
    out: Vector = {}
    for (l, mono), c in fld.terms.items():
        _TermAction(fld.system, l, mono, c).apply(-p - 1, (), out)
    return all(s in space.index for s in out)


# brackets --------------------------------------------------------------------------


@dataclass
class BracketResult:
    """(Super)commutator columns on the joint exactness window."""

    space: TruncatedFock
    window: frozenset
    columns: dict  # col index -> Vector
    scalar: Optional[Scalar]

    def is_scalar(self) -> bool:
        return self.scalar is not None


def _scalar_part(space: TruncatedFock, window, columns) -> Optional[Scalar]:
    lam = None
    for k in sorted(window):
        vec = columns[k]
        s = space.basis[k]
        if any(t != s for t in vec):
            return None
        v = vec.get(s, ZERO)
        if lam is None:
            lam = v
        elif v != lam:
            return None
    return lam


def bracket(a: ModeOperator, b: ModeOperator, upto_cutoff: bool = False) -> BracketResult:
    """[A, B] = AB - (-1)^{p(A)p(B)} BA, column by column.

    Intermediate states are acted on exactly even when they lie beyond the
    cutoffs, so every column is the exact image of its basis state.  The
    window holds the columns whose image fits in the truncated basis.

    With ``upto_cutoff`` only the energy components <= E of each image are
    kept.  The bracket relation holds in every energy component separately,
    so these are still exact, and skipping the rest is much cheaper for
    fields with several energy shifts.  Columns whose whole image lies above
    E are then left out of the window.
    """
    if a.space is not b.space:
        raise ValueError("operators act on different spaces")
    space = a.space
    system = space.system
    top = space.energy_cutoff
    sign = -1 if (a.parity or 0) and (b.parity or 0) else 1
    lowest = None
    if upto_cutoff and a.graded and b.graded and a.energy_shifts and b.energy_shifts:
        lowest = min(a.energy_shifts) + min(b.energy_shifts)
    cols = {}
    for k, s in enumerate(space.basis):
        if upto_cutoff:
            if lowest is not None and space.energies[k] + lowest > top:
                continue
            # intermediate states only matter if the second operator can bring them below E
            mid_b = b.apply_upto({s: 1}, top - min(a.energy_shifts)) if a.graded and a.energy_shifts \
                else b.apply_state(s)
            mid_a = a.apply_upto({s: 1}, top - min(b.energy_shifts)) if b.graded and b.energy_shifts \
                else a.apply_state(s)
            ab = a.apply_upto(mid_b, top)
            ba = b.apply_upto(mid_a, top)
        else:
            ab = a.apply(b._raw[k])
            ba = b.apply(a._raw[k])
        for t, v in ba.items():
            _add(ab, t, -v if sign == 1 else v)
        if upto_cutoff:
            ab = {t: v for t, v in ab.items() if _state_energy(system, t) <= top}
        if all(t in space.index for t in ab):
            cols[k] = _norm_vec(ab)
    if not cols:
        raise WindowError("empty exactness window for the bracket; increase the energy or particle cutoff")
    window = frozenset(cols)
    return BracketResult(space, window, cols, _scalar_part(space, window, cols))


def _gen_binom(m: int, k: int) -> Fraction:
    num = 1
    for i in range(k):
        num *= m - i
    return Fraction(num, 1) / Fraction(_fact(k))


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def predicted_bracket(res, m: int, n: int) -> list[tuple[Scalar, Field, int]]:
    """[a_(m), b_(n)] = sum_{j,k} C(m,k) eps^{j(m-k)} (c_jk)_(m+n-k), as (weight, c_jk, raw power)."""
    system = res.system
    out = []
    for (j, k), cf in sorted(res.terms.items()):
        w = _gen_binom(m, k)
        if w == 0:
            continue
        weight = make_root(system.num_points, j * (m - k)) * w
        out.append((weight, cf, m + n - k))
    return out


@dataclass
class BracketComparison:
    """Outcome for one (m, n): status is "agree", "differ" or "no-window"."""

    m: int
    n: int
    status: str
    window: int
    oracle_scalar: Optional[Scalar]
    detail: str = ""

    @property
    def agree(self) -> bool:
        return self.status == "agree"


def bracket_vs_ope(a: Field, b: Field, pairs: Iterable[tuple[int, int]], space: TruncatedFock,
                   res=None, operators: Optional[dict] = None) -> list[BracketComparison]:
    """Compare oracle brackets of raw modes with the prediction from the singular part.

    Pairs whose bracket has an empty exactness window are reported as
    ``no-window`` rather than compared.  ``operators`` may be a dict shared
    between calls on the same space; mode operators are cached in it by
    (field, raw power).
    """
    if res is None:
        res = ope(a, b)
    ops: dict = {} if operators is None else operators

    def op(f, q):
        key = (f, q)
        if key not in ops:
            ops[key] = ModeOperator(f, q, space)
        return ops[key]

    out = []
    for m, n in pairs:
        try:
            br = bracket(op(a, m), op(b, n), upto_cutoff=True)
        except WindowError as exc:
            out.append(BracketComparison(m, n, "no-window", 0, None, str(exc)))
            continue
        pred_ops = [(_fast(wt), op(cf, q)) for wt, cf, q in predicted_bracket(res, m, n)]
        bad = []
        for k in sorted(br.window):
            s = space.basis[k]
            want: Vector = {}
            for wt, pop in pred_ops:
                for t, v in pop.apply_upto({s: 1}, space.energy_cutoff).items():
                    _add(want, t, wt * v)
            want = {t: v for t, v in want.items() if _state_energy(space.system, t) <= space.energy_cutoff}
            if _norm_vec(want) != br.columns[k]:
                bad.append(space.describe(s))
        detail = "" if not bad else f"columns differ: {', '.join(bad[:3])}"
        out.append(BracketComparison(m, n, "differ" if bad else "agree", len(br.window), br.scalar, detail))
    return out


def stable_bracket(a: Field, p: int, b: Field, q: int, energy_cutoff, particle_cutoff: Optional[int] = None,
                   grow: int = 2) -> tuple[BracketResult, bool]:
    """Bracket at (E, P) plus a re-check at (E + grow, P + grow); returns (result, stable)."""
    sp1 = build_space(a.system, energy_cutoff, particle_cutoff)
    r1 = bracket(ModeOperator(a, p, sp1), ModeOperator(b, q, sp1))
    p2 = None if particle_cutoff is None else particle_cutoff + grow
    sp2 = build_space(a.system, Fraction(energy_cutoff) + grow, p2)
    r2 = bracket(ModeOperator(a, p, sp2), ModeOperator(b, q, sp2))
    stable = r1.scalar == r2.scalar
    if stable:
        for k, vec in r1.columns.items():
            k2 = sp2.index[sp1.basis[k]]
            if k2 in r2.columns and r2.columns[k2] != vec:
                stable = False
                break
    return r1, stable
