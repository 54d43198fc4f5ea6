import random
from fractions import Fraction
from math import isqrt

import pytest

from approxalg.algebra import big_line_bundle_curve, generated, polytope_monomial
from approxalg.divisor import (
    INF,
    FiniteDivisor,
    PrimeDivisor,
    analytic_bound,
    check_inclusion,
    check_monotonicity,
    coefficient_decay,
    compute_Dm,
    divisibility_pairs,
    divisor_limit_estimate,
    pole_divisor,
)
from approxalg.errors import ValuationError
from approxalg.kernel import Poly, RationalFunctionElement
from helpers import random_combination
from oracles import X, dyadic_floor_divisor, floor_divisor_generic, sympy_order

V = ("x",)
x = Poly.variable(V, "x")
one = Poly.constant(V)
P = PrimeDivisor.point


def test_pole_divisor_examples():
    assert pole_divisor(RationalFunctionElement(one, {x: 2}), "curve").coefficients == {P(0): 2}
    assert pole_divisor(RationalFunctionElement(x ** 3), "curve").coefficients == {INF: 3}
    f = RationalFunctionElement(x - 1, {x: 1, Poly.linear(2): 1})
    d = pole_divisor(f, "curve")
    assert d.coefficients == {P(0): 1, P(2): 1} and d[INF] == 0
    with pytest.raises(ValuationError):
        pole_divisor(RationalFunctionElement(Poly(V, {})), "curve")


def test_pole_divisor_agrees_with_sympy_orders(instances):
    rng = random.Random(11)
    for name in ("dyadic", "harmonic_squares", "line"):
        model = instances[name]
        for m in (3, 5, 8):
            f = random_combination(model.graded_piece(m), rng)
            num = sum(c * X ** e[0] for e, c in f.numerator.terms.items())
            den = 1
            for fac, k in f.factors:
                den *= sum(c * X ** e[0] for e, c in fac.terms.items()) ** k
            expr = num / den
            d = pole_divisor(f, "curve")
            for c in d.support:
                point = "inf" if c == INF else c.value
                assert d[c] == -sympy_order(expr, point), (name, m, c)
            assert sympy_order(expr, "inf") >= -d[INF]


def test_laurent_pole_divisor():
    vars2 = ("x1", "x2")
    x1, x2 = Poly.variable(vars2, "x1"), Poly.variable(vars2, "x2")
    f = RationalFunctionElement(x1 + x2 ** 2, {x1: 2, x2: 1})
    assert pole_divisor(f, "laurent").coefficients == {PrimeDivisor.hyperplane(0): 2, PrimeDivisor.hyperplane(1): 1}


def test_prime_divisor_labels():
    assert [str(P(2)), str(INF), str(PrimeDivisor.hyperplane(0)), str(P(Fraction(-1, 2)))] == \
        ["[2]", "[inf]", "[x1=0]", "[-1/2]"]
    assert str(FiniteDivisor({P(1): 2, INF: 1})) == "2*[1] + 1*[inf]"
    assert str(FiniteDivisor({})) == "0"


def test_compute_Dm_examples(instances):
    assert compute_Dm(big_line_bundle_curve(1), 3).coefficients == {P(0): 3}
    assert compute_Dm(instances["dyadic"], 4).coefficients == {P(1): 2, P(2): 1}
    gen = generated(big_line_bundle_curve(1), [(1, RationalFunctionElement(one)),
                                              (1, RationalFunctionElement(one, {x: 1}))])
    assert compute_Dm(gen, 2).coefficients == {P(0): 2}


def test_curve_Dm_is_floor_divisor(instances):
    for m in range(1, 40):
        d = compute_Dm(instances["dyadic"], m)
        assert {c.value: k for c, k in d.coefficients.items()} == dyadic_floor_divisor(m)
    hs = instances["harmonic_squares"]
    coeffs = {Fraction(i): Fraction(607, 1000) / i ** 2 for i in range(1, 60)}
    for m in range(1, 30):
        d = compute_Dm(hs, m)
        assert {c.value: k for c, k in d.coefficients.items()} == floor_divisor_generic(coeffs, m)


def test_Dm_does_not_depend_on_basis(instances):
    rng = random.Random(5)
    for name in ("dyadic", "triangle", "generated_dyadic", "harmonic_squares"):
        model = instances[name]
        for m in (2, 3, 6):
            piece = model.graded_piece(m)
            others = [random_combination(piece, rng) for _ in range(piece.dim + 2)]
            best = {}
            for f in others + list(piece.elements):
                for c, k in pole_divisor(f, model.geometry).coefficients.items():
                    best[c] = max(best.get(c, 0), k)
            assert best == compute_Dm(model, m).coefficients, (name, m)


def test_estimate_examples(instances):
    line = divisor_limit_estimate(big_line_bundle_curve(1), 12)
    assert line.sup_divisor() == {P(0): 1}
    assert all(Fraction(k, m) == 1 for m, k in line.records[P(0)].sequence)
    dy = divisor_limit_estimate(instances["dyadic"], 16)
    assert dy.sup_divisor() == {P(1): Fraction(1, 2), P(2): Fraction(1, 4), P(3): Fraction(1, 8),
                                P(4): Fraction(1, 16)}
    assert dy.records[P(4)].argmax == 16
    assert divisor_limit_estimate(instances["parity"], 12).sup_divisor() == {}


def test_divisibility_subsequence(instances):
    est = divisor_limit_estimate(instances["dyadic"], 16)
    assert [m for m, _ in est.divisibility[P(1)]] == [1, 2, 4, 8, 16]
    vals = [v for _, v in est.divisibility[P(2)]]
    assert vals == sorted(vals)


def test_monotonicity_examples(instances):
    assert check_monotonicity(instances["dyadic"], [(2, 4)]).ok
    assert check_monotonicity(instances["triangle"], [(5, 5)]).ok
    assert check_monotonicity(big_line_bundle_curve(1), [(3, 12)]).ok
    with pytest.raises(ValueError):
        check_monotonicity(instances["dyadic"], [(3, 4)])


def test_monotonicity_on_shipped_instances(instances):
    pairs = divisibility_pairs(24)
    for name, model in instances.items():
        rep = check_monotonicity(model, pairs)
        assert rep.ok, (name, rep.failures[:3])
        assert len(rep.checked) == len(pairs)


def test_non_divisible_decreases_are_observations(instances):
    rep = check_monotonicity(instances["dyadic"], divisibility_pairs(8), observe_up_to=8)
    assert rep.ok
    # floor(3/2)/3 = 1/3 < floor(2/2)/2 = 1/2
    assert (2, 3, P(1), Fraction(1, 2), Fraction(1, 3)) in rep.observations


def test_analytic_bound(instances):
    for name in ("dyadic", "harmonic_squares", "line", "generated_dyadic", "dyadic_even"):
        model = instances[name]
        est = divisor_limit_estimate(model, 12)
        for c in est.primes:
            bound = analytic_bound(model, c)
            assert bound is not None and est.sup(c) <= bound, (name, c)
    assert analytic_bound(instances["dyadic_even"], P(1)) == 1
    model = polytope_monomial([(-1, 0), (1, 0), (0, 1)], truncation=64)
    est = divisor_limit_estimate(model, 8)
    assert est.sup(PrimeDivisor.hyperplane(0)) == analytic_bound(model, PrimeDivisor.hyperplane(0)) == 1
    assert analytic_bound(instances["parity"], PrimeDivisor.hyperplane(0)) == 0


def test_inclusion_examples(instances):
    line = big_line_bundle_curve(1)
    assert check_inclusion(line, divisor_limit_estimate(line, 12), 12).ok
    dy = instances["dyadic"]
    assert check_inclusion(dy, divisor_limit_estimate(dy, 16), 16).ok
    gen = instances["generated_dyadic"]
    assert check_inclusion(gen, divisor_limit_estimate(gen, 12), 12).ok


def test_under_truncated_estimate_fails_with_witness(instances):
    dy = instances["dyadic"]
    rep = check_inclusion(dy, divisor_limit_estimate(dy, 2), degrees=[8])
    assert not rep.ok
    primes = {c for _, c, _, _ in rep.failures}
    assert primes == {P(2), P(3)}
    assert (8, P(2), 2, 0) in rep.failures
    assert rep.notes


def test_decay_examples(instances):
    dy = coefficient_decay(divisor_limit_estimate(instances["dyadic"], 16), instances["dyadic"])
    assert (dy.counts[2], dy.counts[4], dy.counts[8]) == (1, 2, 3)
    line = coefficient_decay(divisor_limit_estimate(big_line_bundle_curve(1), 12))
    assert line.coefficients == [(P(0), 1)]


def test_harmonic_squares_decay(instances):
    model = instances["harmonic_squares"]
    rep = coefficient_decay(divisor_limit_estimate(model, 24), model, levels=10)
    c = Fraction(607, 1000)
    for l in range(1, 11):
        # a_i >= 1/l  <=>  i^2 <= c l
        assert rep.analytic_counts[l] == sum(1 for i in range(1, 50) if c / i ** 2 >= Fraction(1, l))
        assert rep.analytic_counts[l] <= isqrt(l)
        assert rep.counts[l] <= rep.analytic_counts[l]
    assert rep.analytic_counts[10] == 2
