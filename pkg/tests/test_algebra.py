from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from approxalg.algebra import (
    CustomSlice,
    InfiniteDivisorSpec,
    LaurentMonomial,
    PowerTail,
    Rescale,
    big_line_bundle_curve,
    dyadic_curve,
    generated,
    graded_piece,
    polytope_monomial,
    power_chain,
    power_image,
    require_valid,
    subalgebra_rescale,
    tail_family,
    validate_model,
)
from approxalg.errors import ModelError, TruncationError, ValidationError
from approxalg.kernel import Poly, RationalFunctionElement, contains, echelonize, spans_equal
from oracles import (
    curve_basis_sympy,
    digit_sum,
    dyadic_dim_by_summation,
    dyadic_floor_divisor,
    sympy_power_dim,
    sympy_span_dim,
    triangle_lattice_count,
)

V = ("x",)
x = Poly.variable(V, "x")
one = Poly.constant(V)


def test_graded_piece_examples(instances):
    piece = graded_piece(big_line_bundle_curve(1), 3)
    ref = echelonize([RationalFunctionElement(one, {x: k}) for k in range(4)])
    assert piece.dim == 4 and spans_equal(piece, ref)
    assert instances["dyadic"].rank(4) == 4
    assert instances["parity"].rank(5) == 1
    assert instances["triangle"].rank(0) == 1


def test_dyadic_floor_divisor_matches_oracle(instances):
    spec = instances["dyadic"].divisor
    for m in range(0, 70):
        assert spec.floor_divisor(m) == dyadic_floor_divisor(m)


def test_digit_sum_identity_by_direct_summation():
    # the closed form is checked against direct summation before it is trusted
    for m in range(0, 600):
        assert dyadic_dim_by_summation(m) == m - digit_sum(m) + 1


def test_dyadic_ranks_follow_digit_sum(instances):
    for m in range(0, 130):
        assert instances["dyadic"].rank(m) == m - digit_sum(m) + 1


def test_dyadic_pieces_match_sympy_basis(instances):
    for m in (2, 3, 5, 6, 8):
        exprs = curve_basis_sympy(dyadic_floor_divisor(m))
        assert sympy_span_dim(exprs) == instances["dyadic"].rank(m)


def test_power_image_examples(instances):
    dy = instances["dyadic"]
    assert power_image(dy, 2, 2).dim == 3
    for p in (1, 3, 5):
        assert power_image(dy, p, 1) == dy.graded_piece(p)
    assert power_image(dy, 8, 16).dim == 113


def test_power_dims_match_sympy_at_small_n(instances):
    dy = instances["dyadic"]
    basis = curve_basis_sympy(dyadic_floor_divisor(8))
    for n in (1, 2, 3):
        assert power_image(dy, 8, n).dim == sympy_power_dim(basis, n) == 7 * n + 1


def test_power_chain_agrees_with_squaring(instances):
    for name in ("dyadic", "triangle", "parity"):
        model = instances[name]
        chain = power_chain(model, 3, 5)
        for n, b in enumerate(chain, 1):
            assert b == power_image(model, 3, n), (name, n)


def test_power_dimension_is_bounded_by_piece(instances):
    for name in ("dyadic", "parity", "harmonic_squares", "generated_dyadic"):
        model = instances[name]
        for p in (1, 2, 3):
            for n, b in enumerate(power_chain(model, p, 6), 1):
                assert b.dim <= model.rank(n * p)


def test_subalgebra_rescale(instances):
    dy = instances["dyadic"]
    same = subalgebra_rescale(dy, 1)
    assert all(same.graded_piece(m) == dy.graded_piece(m) for m in range(12))
    assert subalgebra_rescale(dy, 2).rank(2) == 4
    even = subalgebra_rescale(instances["parity"], 2)
    assert [even.rank(n) for n in range(1, 8)] == [2 * n + 1 for n in range(1, 8)]


@given(st.integers(1, 4), st.integers(1, 5), st.integers(1, 4))
def test_rescale_power_property(k, p, n):
    # S^n of the rescaled degree-p piece is S^n of B_{kp}
    dy = dyadic_curve(truncation=256)
    assert power_image(Rescale(dy, k), p, n) == power_image(dy, k * p, n)


def test_validation_examples(instances):
    rep = validate_model(instances["dyadic"])
    assert rep.ok and rep.first_nonempty == 1
    par = validate_model(instances["parity"])
    assert par.first_nonempty == 1 and not par.zero_degrees
    assert not par.fatal
    closure = [f for f in par.failures if f.check == "closure"]
    assert closure and closure[0].severity == "finding"


def test_corrupted_slice_reports_closure_witness():
    # S_1 = {0, 1} but S_2 = {0}: x * x is missing
    bad = LaurentMonomial(CustomSlice("corrupt", 1, lambda m: [(0,), (1,)] if m == 1 else [(0,)]), truncation=8)
    rep = validate_model(bad, samples=40, seed=1)
    fail = [f for f in rep.failures if f.check == "closure"]
    assert fail
    w = fail[0].witness
    assert {"m1", "m2", "f", "g"} <= set(w)
    assert not contains(bad.graded_piece(w["m1"] + w["m2"]), w["f"] * w["g"])


def test_broken_b0_is_fatal():
    bad = LaurentMonomial(CustomSlice("nobase", 1, lambda m: [(1,)]), truncation=8)
    with pytest.raises(ValidationError) as err:
        require_valid(bad)
    assert err.value.report.fatal


def test_all_shipped_instances_validate_without_fatal_findings(instances):
    for name, model in instances.items():
        assert not validate_model(model, samples=8).fatal, name


def test_constructor_errors():
    with pytest.raises(ModelError):
        InfiniteDivisorSpec(((1, Fraction(1, 2)), (1, Fraction(1, 4))))
    with pytest.raises(ModelError):
        tail_family("harmonic", (1,))
    assert tail_family("harmonic", (1,), allow_divergent=True, truncation=16).rank(4) >= 1
    with pytest.raises(ModelError):
        tail_family("nope")
    with pytest.raises(ModelError):
        Rescale(dyadic_curve(), 0)
    with pytest.raises(ModelError):
        generated(big_line_bundle_curve(1), [(1, RationalFunctionElement(one, {x: 2}))])


def test_truncation_is_enforced():
    model = dyadic_curve(truncation=10)
    with pytest.raises(TruncationError):
        model.graded_piece(11)
    with pytest.raises(TruncationError):
        power_image(model, 4, 3)


def test_tail_points_skip_declared_support():
    spec = InfiniteDivisorSpec(((2, 1),), PowerTail(1, 2, (Fraction(1, 2),)))
    pts = [spec.tail_point(i) for i in range(1, 6)]
    assert pts == [Fraction(1, 2), 1, 3, 4, 5]
    assert all(spec.tail_index(p) == i for i, p in enumerate(pts, 1))
    assert spec.coefficient(3) == Fraction(1, 9)
    assert spec.coefficient(2) == 1


def test_harmonic_squares_counts():
    spec = tail_family("harmonic-squares").divisor
    c = Fraction(607, 1000)
    for l in range(1, 40):
        t = Fraction(1, l)
        assert spec.tail_count(t) == sum(1 for i in range(1, 100) if c / i ** 2 >= t)


def test_triangle_piece_counts(instances):
    tri = instances["triangle"]
    for m in range(8):
        assert tri.rank(m) == triangle_lattice_count(m)


def test_rational_polytope_slice():
    model = polytope_monomial([(0, 0), (Fraction(1, 2), 0), (0, 1)])
    # lattice points of m * P: a, b >= 0, 2a + b <= m
    for m in range(7):
        assert model.rank(m) == sum(1 for a in range(m + 1) for b in range(m + 1) if 2 * a + b <= m)


def test_generated_subalgebra_of_line(instances):
    gl, line = instances["generated_line"], instances["line"]
    for m in range(10):
        assert spans_equal(gl.graded_piece(m), line.graded_piece(m))
    gd = instances["generated_dyadic"]
    for m in range(1, 12):
        assert gd.rank(m) <= instances["dyadic"].rank(m)


def test_sympy_expansion_of_dyadic_product():
    # explicit expansion: B_2 * B_2 with B_2 = L([1])
    X = sp.Symbol("x")
    basis = [1 / (X - 1), X / (X - 1)]
    assert sympy_power_dim(basis, 2) == 3
