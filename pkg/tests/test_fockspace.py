from fractions import Fraction

import pytest

from multiboson.catalog import betagamma_system, chi_system, derived_field
from multiboson.fieldcalc import Field
from multiboson.fockspace import (FockSizeError, ModeOperator, WindowError, bracket, bracket_vs_ope, build_space,
                                  raw_mode, stable_bracket)
from multiboson.scalars import as_scalar


@pytest.fixture(scope="module")
def chi():
    return Field.generator(chi_system(2), "chi")


@pytest.fixture(scope="module")
def chi_space():
    return build_space(chi_system(2), 6)


def test_chi_basis_at_three_halves():
    sp = build_space(chi_system(2), Fraction(3, 2))
    assert [sp.describe(s) for s in sp.basis] == [
        "|0>", "chi_-1/2 |0>", "chi_-1/2 chi_-1/2 |0>", "chi_-3/2 |0>", "chi_-1/2 chi_-1/2 chi_-1/2 |0>"]


def test_betagamma_basis_needs_particle_cutoff():
    sp = build_space(betagamma_system(), 0, 2)
    assert [sp.describe(s) for s in sp.basis] == ["|0>", "gamma_0 |0>", "gamma_0 gamma_0 |0>"]
    with pytest.raises(FockSizeError):
        build_space(betagamma_system(), 2)


def test_space_validation():
    with pytest.raises(ValueError):
        build_space(chi_system(2), -1)
    with pytest.raises(ValueError):
        build_space(betagamma_system(), 1, 0)
    with pytest.raises(FockSizeError):
        build_space(chi_system(2), 30, size_bound=100)


def test_basis_is_energy_ordered(chi_space):
    assert chi_space.energies == sorted(chi_space.energies)
    assert chi_space.basis[0] == chi_space.vacuum


def test_chi_mode_brackets(chi, chi_space):
    ops = {p: ModeOperator(chi, p, chi_space) for p in range(-4, 4)}
    for p in ops:
        for q in ops:
            r = bracket(ops[p], ops[q])
            want = (-1) ** (p % 2) if p + q == -1 else 0
            assert r.scalar == as_scalar(want), (p, q)
            assert len(r.window) == len(chi_space)


def test_mode_energy_shift(chi, chi_space):
    assert ModeOperator(chi, 1, chi_space).energy_shift == Fraction(-3, 2)
    assert ModeOperator(chi, -3, chi_space).energy_shift == Fraction(5, 2)


def test_creation_triples(chi, chi_space):
    assert ModeOperator(chi, -2, chi_space).triples()[:3] == [(3, 0, "1"), (5, 1, "1"), (8, 2, "1")]


def test_empty_window(chi, chi_space):
    with pytest.raises(WindowError):
        raw_mode(chi, -40, chi_space)
    # the commutator itself is still a scalar, so its columns fit
    near = ModeOperator(chi, 39, chi_space)
    assert bracket(ModeOperator(chi, -40, chi_space), near).scalar == as_scalar(1)


def test_operators_on_different_spaces(chi, chi_space):
    other = build_space(chi_system(2), 2)
    with pytest.raises(ValueError):
        bracket(ModeOperator(chi, 0, chi_space), ModeOperator(chi, 0, other))


def test_stable_bracket(chi):
    r, stable = stable_bracket(chi, 0, chi, -1, 4)
    assert stable and r.scalar == as_scalar(1)


def test_bracket_vs_ope_chi_current():
    h = derived_field("h_chi_tw")
    sp = build_space(chi_system(2), 4)
    out = bracket_vs_ope(h, h, [(p, q) for p in range(-3, 3) for q in range(-3, 3)], sp)
    assert all(c.status in ("agree", "no-window") for c in out)
    assert sum(c.agree for c in out) >= 30


def test_bracket_vs_ope_betagamma():
    sys = betagamma_system()
    b, g = Field.generator(sys, "beta"), Field.generator(sys, "gamma")
    sp = build_space(sys, 3, 3)
    out = bracket_vs_ope(b, g, [(p, q) for p in range(-3, 3) for q in range(-3, 3)], sp)
    assert all(c.status in ("agree", "no-window") for c in out)
    assert any(c.agree for c in out)
