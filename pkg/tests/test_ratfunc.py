from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from multiboson.ratfunc import PoleError, RatFunc, expand, partial_fractions, verify_interpolation_identity
from multiboson.ratfunc import format_ratfunc, laurent_at
from multiboson.scalars import ONE, as_scalar, make_root

HALF = Fraction(1, 2)


def q(x):
    return as_scalar(Fraction(x))


def test_canonical_text():
    assert format_ratfunc(RatFunc.pole(HALF)) == "1/(z+w)"
    h = RatFunc({(2, 0): q("-1/2"), (0, 2): q("-1/2")}, roots={Fraction(0): 2, HALF: 2})
    assert format_ratfunc(h) == "-(z^2+w^2)/(2*(z^2-w^2)^2)"
    assert format_ratfunc(RatFunc.pole(HALF) - RatFunc.pole(0)) == "-2*w/(z^2-w^2)"


def test_equality_is_exact_cross_multiplication():
    a = RatFunc.pole(0) * RatFunc.pole(HALF)
    # 1/(z-w) - 1/(z+w) = 2w/(z^2-w^2)
    b = (RatFunc.pole(0) - RatFunc.pole(HALF)) * RatFunc({(0, 1): q(2)}).reciprocal()
    assert a == b
    assert a != b + RatFunc.const(q("1/1000000"))


def test_disallowed_factor():
    with pytest.raises(PoleError):
        RatFunc({(2, 0): ONE, (0, 1): ONE}).reciprocal()
    assert RatFunc({(1, 0): ONE, (0, 1): ONE}).reciprocal() == RatFunc.pole(HALF)


def test_partial_fraction_examples():
    sq = RatFunc({(0, 0): ONE}, roots={Fraction(0): 1, HALF: 1})
    pf = partial_fractions(sq)
    assert pf.coefficient(0, 1) == {-1: q("1/2")}
    assert pf.coefficient(HALF, 1) == {-1: q("-1/2")}
    hbg = RatFunc({(1, 0): q("-1/2"), (0, 1): q("-1/2")}, roots={Fraction(0): 2})
    pf = partial_fractions(hbg)
    assert pf.coefficient(0, 2) == {1: -ONE}
    assert pf.coefficient(0, 1) == {0: q("-1/2")}
    hchi = RatFunc({(2, 0): q("-1/2"), (0, 2): q("-1/2")}, roots={Fraction(0): 2, HALF: 2})
    pf = partial_fractions(hchi)
    assert pf.coefficient(0, 2) == {0: q("-1/4")} and pf.coefficient(HALF, 2) == {0: q("-1/4")}
    assert pf.coefficient(0, 1) == {} and pf.coefficient(HALF, 1) == {}


def test_expand_examples():
    e = expand(RatFunc.pole(HALF), "z", 3)
    assert e.coeffs == {(-1, 0): ONE, (-2, 1): -ONE, (-3, 2): ONE, (-4, 3): -ONE}
    e = expand(RatFunc.pole(0), "w", 2)
    assert e.coeffs == {(0, -1): -ONE, (1, -2): -ONE, (2, -3): -ONE}


def test_expand_recombination_of_partial_fractions():
    sq = RatFunc({(0, 0): ONE}, roots={Fraction(0): 1, HALF: 1})
    for order in range(13):
        assert expand(sq, "z", order) == expand(partial_fractions(sq).recombine(), "z", order)


def test_laurent_at_recentres():
    # 1/(z^2 - w^2) = 1/((z-w)(z+w)); at z = w the leading term is 1/(2w) t^-1
    sq = RatFunc({(0, 0): ONE}, roots={Fraction(0): 1, HALF: 1})
    loc = laurent_at(sq, Fraction(0), 0)
    assert loc[-1] == {-1: q("1/2")}
    assert loc[0] == {-2: q("-1/4")}


@pytest.mark.parametrize("n", range(1, 9))
def test_interpolation_identity(n):
    for l in range(1, 2 * n + 1):
        assert verify_interpolation_identity(n, l).equal


def test_interpolation_small_cases():
    assert verify_interpolation_identity(1, 1).lhs == "-2*w/(z^2-w^2)"
    assert verify_interpolation_identity(1, 2).lhs == "2*z/(z^2-w^2)"
    assert verify_interpolation_identity(2, 3).lhs == "-4*z^2*w/(z^4-w^4)"


coef = st.integers(-4, 4).map(lambda k: as_scalar(k))


@st.composite
def admissible(draw, points=4):
    """Random numerator over a denominator from the allowed locus (N = points)."""
    num = {}
    for _ in range(draw(st.integers(1, 4))):
        key = (draw(st.integers(0, 3)), draw(st.integers(0, 3)))
        c = draw(coef)
        if draw(st.booleans()):
            c = c * make_root(points, draw(st.integers(0, points - 1)))
        num[key] = c
    roots = {Fraction(j, points): draw(st.integers(0, 2)) for j in range(points)}
    return RatFunc(num, draw(st.integers(0, 2)), draw(st.integers(0, 1)), roots)


@settings(max_examples=200, deadline=None)
@given(admissible())
def test_partial_fractions_round_trip(f):
    assert partial_fractions(f).recombine() == f


@settings(max_examples=200, deadline=None)
@given(admissible(2), admissible(2), st.integers(0, 5))
def test_expand_respects_multiplication(f, g, order):
    lhs = expand(f * g, "z", order)
    rhs = (expand(f, "z", order + 12) * expand(g, "z", order + 12)).truncated(order)
    assert lhs == rhs
