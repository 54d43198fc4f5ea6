from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from approxalg.errors import FlagError, ValuationError
from approxalg.kernel import INFINITY, Poly, RationalFunctionElement, echelonize
from approxalg.valuation import CoordinateFlag, CurvePoint, multivaluation, valuation_image
from helpers import random_pairs, random_subspaces
from oracles import X, lex_min_exponent, sympy_order

V2 = ("x1", "x2")
x1, x2 = Poly.variable(V2, "x1"), Poly.variable(V2, "x2")
V = ("x",)
x = Poly.variable(V, "x")
one = Poly.constant(V)


def el(num, den=()):
    return RationalFunctionElement(num, den)


def test_multivaluation_examples():
    assert multivaluation(el(x1 ** 2 * x2 + x1 ** 3), CoordinateFlag((0, 1))) == (2, 1)
    assert multivaluation(el(one, {x: 1}), CurvePoint(INFINITY)) == (1,)
    assert multivaluation(el(x1 + x2 ** 2, {x2: 1}), CoordinateFlag((0, 1))) == (0, 1)


def test_flag_order_and_center():
    f = el(x1 * x2 ** 3 + x2)
    assert multivaluation(f, CoordinateFlag((0, 1))) == (0, 1)
    assert multivaluation(f, CoordinateFlag((1, 0))) == (1, 0)
    # centred at (1, 0): x1 -> x1 + 1, so f = (x1 + 1) x2^3 + x2
    assert multivaluation(f, CoordinateFlag((0, 1), (1, 0))) == (0, 1)


def test_valuation_of_zero_and_bad_flags():
    with pytest.raises(ValuationError):
        multivaluation(el(Poly(V, {})), CurvePoint(0))
    with pytest.raises(FlagError):
        CoordinateFlag((0, 0))
    with pytest.raises(FlagError):
        multivaluation(el(x1), CurvePoint(0))
    with pytest.raises(FlagError):
        multivaluation(el(x1), CoordinateFlag((0, 1, 2)))


def test_poles_give_negative_entries():
    f = el(x2, {x1: 1})
    assert multivaluation(f, CoordinateFlag((0, 1))) == (-1, 1)


def test_constants_have_zero_valuation():
    for c in (1, -3, Fraction(5, 7)):
        assert multivaluation(el(Poly.constant(V2, c)), CoordinateFlag((1, 0), (2, -1))) == (0, 0)
        assert multivaluation(el(Poly.constant(V, c)), CurvePoint(INFINITY)) == (0,)


def test_valuation_image_examples():
    assert valuation_image(echelonize([el(one), el(x), el(x ** 2)]), CurvePoint(0)).vectors == ((0,), (1,), (2,))
    img = valuation_image(echelonize([el(1 + x), el(x + x ** 2), el(x ** 2)]), CurvePoint(0))
    assert img.vectors == ((0,), (1,), (2,)) and len(img) == 3
    assert len(valuation_image(echelonize([el(x)]), CurvePoint(5))) == 1


def test_representatives_realise_their_values():
    basis = echelonize([el(1 + x, {Poly.linear(2): 1}), el(x ** 2 + 3, {Poly.linear(2): 1}), el(x + x ** 2)])
    img = valuation_image(basis, CurvePoint(-1))
    for vec, rep in img.representatives.items():
        assert multivaluation(rep, CurvePoint(-1)) == vec


curve_terms = st.dictionaries(st.tuples(st.integers(0, 5)), st.integers(-4, 4).filter(bool), min_size=1, max_size=4)


@given(curve_terms, st.integers(0, 3), st.sampled_from([Fraction(0), Fraction(2), Fraction(-2, 3), INFINITY]))
def test_curve_valuation_matches_sympy_order(terms, k, point):
    f = el(Poly(V, terms), {Poly.linear(1): k} if k else {})
    expr = sum(c * X ** e[0] for e, c in terms.items()) / (X - 1) ** k
    ref = sympy_order(expr, "inf" if point is INFINITY else point)
    assert multivaluation(f, CurvePoint(point)) == (ref,)


plane_terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-3, 3).filter(bool),
                              min_size=1, max_size=5)


@given(plane_terms, st.permutations([0, 1]))
def test_coordinate_valuation_matches_lex_min(terms, order):
    a, b = sp.symbols("a b")
    expr = sum(c * a ** e[0] * b ** e[1] for e, c in terms.items())
    assert multivaluation(el(Poly(V2, terms)), CoordinateFlag(tuple(order))) == \
        lex_min_exponent(expr, (a, b), order)


def test_additivity_and_ultrametric_on_random_pairs(instances):
    for name, flag, f, g in random_pairs(instances, 120, seed=7):
        vf, vg = multivaluation(f, flag), multivaluation(g, flag)
        assert multivaluation(f * g, flag) == tuple(a + b for a, b in zip(vf, vg)), name
        s = f + g
        if not s.is_zero():
            vs = multivaluation(s, flag)
            assert vs >= min(vf, vg), name
            if vf != vg:
                assert vs == min(vf, vg), name


def test_image_size_equals_dimension_on_random_subspaces(instances):
    for name, flag, space, _ in random_subspaces(instances, 60, seed=3):
        assert len(valuation_image(space, flag)) == space.dim, name
