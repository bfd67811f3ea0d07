from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from multiboson.catalog import betagamma_system, chi_system, symplectic_system
from multiboson.fieldcalc import (Deriv, Field, Gen, Ident, Linear, NormalProd, OpeCoeff, ParseError, canonicalize,
                                  expr_parity, format_field, locality_profile, normal_product, ope, parse_expr,
                                  parse_field, taylor_recenter, to_expr)
from multiboson.ratfunc import RatFunc
from multiboson.scalars import I, ONE, as_scalar, make_root

HALF = Fraction(1, 2)
CHI = chi_system(2)
BG = betagamma_system()


def gen(system, name, i=0):
    return Field.generator(system, name, i)


def test_chi_contraction():
    chi = gen(CHI, "chi")
    res = ope(chi, chi)
    assert res.central() == RatFunc.pole(HALF)
    assert not res.non_central()
    assert res.pole_orders() == [0, 1]
    assert locality_profile(chi, chi) == (0, 1)


def test_betagamma_contractions():
    b, g = gen(BG, "beta"), gen(BG, "gamma")
    assert ope(b, g).central() == RatFunc.pole(0)
    assert ope(g, b).central() == -RatFunc.pole(0)
    assert ope(b, b).is_zero() and ope(g, g).is_zero()


def test_symplectic_contraction_matrix():
    s = symplectic_system(1)
    x1, x2 = gen(s, "xi1"), gen(s, "xi2")
    assert ope(x1, x2).central() == RatFunc.pole(0) * RatFunc.const(I)
    assert ope(x2, x1).central() == RatFunc.pole(0) * RatFunc.const(-I)
    assert ope(x1, x1).is_zero()


def test_dilation_and_derivative():
    chi = gen(CHI, "chi")
    assert chi.dilate(1) == gen(CHI, "chi", 1)
    assert chi.dilate(2) == chi
    assert chi.derivative(2) == chi.derivative().derivative()
    # d/dz [z^-1 chi] = -z^-2 chi + z^-1 chi'
    lhs = chi.shift(-1).derivative()
    assert lhs == chi.shift(-2) * as_scalar(-1) + chi.derivative().shift(-1)


def test_normal_product_of_squares():
    chi = gen(CHI, "chi")
    cc = normal_product(chi, chi)
    res = ope(cc, cc)
    want_mixed = normal_product(gen(CHI, "chi", 1), chi) * 4
    assert res.coefficient(1, 1) == Field.identity(CHI, as_scalar(2))
    assert res.coefficient(1, 0) == want_mixed
    assert res.coefficient(0, 0).is_zero()


def test_normal_product_composite():
    b, g = gen(BG, "beta"), gen(BG, "gamma")
    bg = normal_product(b, g)
    sq = normal_product(bg, bg)
    want = (normal_product(b, normal_product(b, normal_product(g, g)))
            + normal_product(b, g.derivative()) - normal_product(b.derivative(), g))
    assert sq == want


def test_normal_product_dilation_argument():
    chi = gen(CHI, "chi")
    assert normal_product(chi, chi, 1) == normal_product(gen(CHI, "chi", 1), chi)


def test_ope_of_composite_with_generator():
    b, g = gen(BG, "beta"), gen(BG, "gamma")
    res = ope(normal_product(b, g), b)
    assert res.coefficient(0, 0) == -b
    assert len(res.terms) == 1


def test_taylor_recentre_chi():
    chi = gen(CHI, "chi")
    terms = taylor_recenter(chi, 1, 2)
    assert [t for _, t in terms] == [0, 1, 2]
    assert terms[0][0] == gen(CHI, "chi", 1)
    # a'(-w) = -d/dw[a(-w)]
    assert terms[1][0] == Field.atom(CHI, "chi", 1, 1) * as_scalar(-1)
    assert terms[2][0] == Field.atom(CHI, "chi", 2, 1) * as_scalar(mpq(1, 2))


def test_ope_coefficient_node():
    assert canonicalize(OpeCoeff(Gen("chi"), Gen("chi"), 1, 0), CHI) == Field.identity(CHI)
    assert canonicalize(OpeCoeff(Gen("chi"), Gen("chi"), 0, 0), CHI).is_zero()


def test_parity():
    assert expr_parity(NormalProd(Gen("beta"), Gen("gamma")), BG) == 0
    assert expr_parity(Ident(), BG) == 0


def test_unknown_generator():
    with pytest.raises(KeyError):
        gen(CHI, "psi")


def test_text_format():
    chi = gen(CHI, "chi")
    f = (chi - gen(CHI, "chi", 1)).shift(-1) * as_scalar(mpq(1, 2))
    assert format_field(f) == "1/2 z^-1 * chi(e^0 z) + -1/2 z^-1 * chi(e^1 z)"
    assert format_field(Field.identity(CHI)) == "Id"
    assert format_field(Field.zero(CHI)) == "0"


def test_parser_examples():
    chi = gen(CHI, "chi")
    assert parse_field("chi(e^0 z)", CHI) == chi
    assert parse_field("chi(z)", CHI) == chi
    assert parse_field(":chi(e^0 z) chi(e^1 z):", CHI) == normal_product(chi, gen(CHI, "chi", 1))
    assert parse_field("D^2[chi(e^1 z)]", CHI) == Field.atom(CHI, "chi", 2, 1)
    assert parse_field("{e}_4 * Id", CHI) == Field.identity(CHI, I)
    assert parse_field("<x> + -1 * <x>", CHI, {"x": chi}).is_zero()


@pytest.mark.parametrize("text", ["chi(e^0 z", ":chi(z):", "chi(z) +", "3 chi(z)", "<y>"])
def test_parser_errors(text):
    with pytest.raises(ParseError):
        parse_field(text, CHI, {})


# random expressions --------------------------------------------------------------------


def exprs(system, names, n_points):
    coeff = st.tuples(st.integers(-3, 3), st.integers(1, 3)).map(lambda t: as_scalar(mpq(*t)))
    root = st.integers(0, 2 * n_points - 1).map(lambda k: make_root(2 * n_points, k))
    scal = st.one_of(coeff, st.tuples(coeff, root).map(lambda t: t[0] * t[1]))
    leaf = st.one_of(st.builds(Gen, st.sampled_from(names), st.integers(0, n_points - 1)), st.just(Ident()))

    def extend(sub):
        return st.one_of(
            st.builds(Deriv, sub, st.integers(1, 2)),
            st.builds(NormalProd, leaf, sub, st.integers(0, n_points - 1)),
            st.lists(st.tuples(scal, st.integers(-2, 2), sub), min_size=1, max_size=3)
            .map(lambda ts: Linear(tuple(ts))),
        )

    return st.recursive(leaf, extend, max_leaves=4)


@settings(max_examples=200, deadline=None)
@given(exprs(CHI, ["chi"], 2))
def test_canonicalization_idempotent_chi(e):
    f = canonicalize(e, CHI)
    assert canonicalize(to_expr(f), CHI) == f
    assert canonicalize(f, CHI) == f


@settings(max_examples=200, deadline=None)
@given(exprs(BG, ["beta", "gamma"], 1))
def test_canonicalization_idempotent_betagamma(e):
    f = canonicalize(e, BG)
    assert canonicalize(to_expr(f), BG) == f


@settings(max_examples=200, deadline=None)
@given(exprs(chi_system(4), ["chi"], 4))
def test_parser_round_trip(e):
    system = chi_system(4)
    f = canonicalize(e, system)
    text = format_field(f)
    assert parse_field(text, system) == f
    assert format_field(parse_field(text, system)) == text
    assert canonicalize(parse_expr(text), system) == f
