from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from approxalg.algebra import Rescale, big_line_bundle_curve, dyadic_curve, power_image
from approxalg.diagnostics import (
    CONSISTENT,
    INCONCLUSIVE,
    VIOLATED,
    approximability_verdict,
    condition3_table,
    default_schedule,
    degenerate_power_certificate,
    growth_proxies,
    liminf_estimate,
    limsup_estimate,
    rank_ratio_check,
)
from approxalg.errors import TruncationError
from oracles import curve_basis_sympy, digit_sum, sympy_power_dim


def dyadic_ratio(p, n):
    # complete series on the line multiply onto complete series, so
    # dim S^n B_p = n * deg floor(pD) + 1
    deg = p - digit_sum(p)
    return Fraction(n * deg + 1, n * p - digit_sum(n * p) + 1)


def test_dyadic_table_matches_closed_form(instances):
    table = condition3_table(instances["dyadic"], [4, 8, 16], 16)
    assert table.ratio(8, 16) == Fraction(113, 128)
    for (p, n), e in table.entries.items():
        assert e.ratio == dyadic_ratio(p, n), (p, n)


def test_closed_form_against_sympy_products():
    dy = dyadic_curve(truncation=64)
    from oracles import dyadic_floor_divisor
    for p in (2, 3, 4):
        basis = curve_basis_sympy(dyadic_floor_divisor(p))
        for n in (2, 3):
            assert power_image(dy, p, n).dim == sympy_power_dim(basis, n)


def test_parity_odd_rows(instances):
    table = condition3_table(instances["parity"], [3, 5], 8)
    assert table.ratio(3, 2) == Fraction(1, 7)
    for p in (3, 5):
        for n in range(1, 9):
            e = table.entries[(p, n)]
            assert e.power_dim == 1
            assert e.ratio == (Fraction(1, p * n + 1) if p * n % 2 == 0 else 1)


def test_line_ratios_are_one(instances):
    table = condition3_table(instances["line"], [1, 2, 3, 5], 8)
    assert all(e.ratio == 1 for e in table.entries.values())


def test_line_products_against_sympy():
    from oracles import X
    for p in (1, 2, 3):
        basis = [X ** -k for k in range(p + 1)]
        for n in (1, 2, 3):
            assert sympy_power_dim(basis, n) == n * p + 1 == big_line_bundle_curve(1).rank(n * p)


def test_power_dim_never_exceeds_piece(instances):
    for name in ("dyadic", "triangle", "parity", "generated_dyadic", "harmonic_squares", "generated_line"):
        table = condition3_table(instances[name], [1, 2, 3], 5)
        for e in table.entries.values():
            assert e.power_dim <= e.piece_dim, (name, e)


@given(st.integers(1, 3), st.sampled_from([1, 2, 3, 4]))
def test_rescaled_table_is_a_subtable(k, p):
    dy = dyadic_curve(truncation=256)
    small = condition3_table(Rescale(dy, k), [p], 6)
    big = condition3_table(dy, [k * p], 6)
    for n in range(1, 7):
        a, b = small.entries[(p, n)], big.entries[(k * p, n)]
        assert (a.power_dim, a.piece_dim) == (b.power_dim, b.piece_dim)


def test_window_estimates():
    seq = [Fraction(1, 2), Fraction(3, 4), Fraction(7, 8)]
    assert liminf_estimate(seq, 2) == Fraction(3, 4)
    assert limsup_estimate(seq, 3) == Fraction(7, 8)
    assert liminf_estimate([Fraction(2, 3)] * 5, 4) == Fraction(2, 3)
    with pytest.raises(ValueError):
        liminf_estimate(seq, 4)
    with pytest.raises(ValueError):
        liminf_estimate([], 1)


def test_dyadic_row_liminf(instances):
    row = condition3_table(instances["dyadic"], [8], 16).row(8)
    assert liminf_estimate([e.ratio for e in row], 4) >= Fraction(7, 8) - Fraction(1, 16)


def test_rank_ratio_examples(instances):
    line = rank_ratio_check(instances["line"], 1, 40)
    for n, q in line.ratios:
        assert q == Fraction(n + 2, n + 1)
        assert abs(q - 1) <= Fraction(1, n + 1)
    dy = rank_ratio_check(instances["dyadic"], 1, 256, start=100, window=(100, 256))
    assert dy.value(127) == Fraction(128, 121)
    assert dy.max_deviation <= Fraction(1, 10)
    par = rank_ratio_check(instances["parity"], 1, 64)
    assert par.max_deviation > 1
    assert par.max_deviation == 64 and par.argmax == 63


def test_zero_pieces_become_infinite_witnesses():
    from approxalg.algebra import CustomSlice, LaurentMonomial
    holes = LaurentMonomial(CustomSlice("holes", 1, lambda m: [] if m % 3 == 1 else [(a,) for a in range(m + 1)]),
                            truncation=64)
    rep = rank_ratio_check(holes, 1, 20)
    assert rep.infinite_witnesses and all(n % 3 == 1 for n in rep.infinite_witnesses)
    assert rep.value(4) is None


def test_truncation_errors():
    small = dyadic_curve(truncation=32)
    with pytest.raises(TruncationError):
        condition3_table(small, [4], 16)
    with pytest.raises(TruncationError):
        rank_ratio_check(small, 1, 32)


def test_default_schedule():
    sched = default_schedule(16)
    assert [(e, p0) for e, p0, _ in sched] == [(Fraction(1, 2), 4), (Fraction(1, 4), 8), (Fraction(1, 8), 16)]
    assert all(w == (13, 16) for _, _, w in sched)


def test_dyadic_verdict(instances):
    sched = [(Fraction(1, 4), 8, (13, 16)), (Fraction(1, 8), 16, (13, 16))]
    v = approximability_verdict(instances["dyadic"], sched, P=[4, 8, 16], N=16)
    assert v.status == CONSISTENT
    assert approximability_verdict(instances["dyadic"], P=[4, 8, 16], N=16).status == CONSISTENT


def test_parity_verdict_has_odd_witness(instances):
    v = approximability_verdict(instances["parity"], N=16)
    assert v.status == VIOLATED
    assert v.witness["p"] % 2 == 1
    assert all(p % 2 == 1 for p in v.witness["certified_p"])
    assert v.witness["bound"] < Fraction(1, 2)
    assert any(line.startswith("witness") for line in v.lines())


def test_line_verdict(instances):
    v = approximability_verdict(instances["line"], N=16)
    assert v.status == CONSISTENT
    assert all(rec["met"] is not None for rec in v.per_epsilon)


def test_generated_subalgebras_are_consistent(instances):
    # finitely generated subalgebras of the line and of the dyadic ring
    sched = [(Fraction(1, 2), 4, (7, 8)), (Fraction(1, 4), 8, (7, 8))]
    for name in ("generated_line", "generated_dyadic", "dyadic_even"):
        v = approximability_verdict(instances[name], sched, P=[4, 8], N=8)
        assert v.status == CONSISTENT, (name, v.lines())


def test_certificate_needs_one_dimensional_piece(instances):
    table = condition3_table(instances["dyadic"], [4], 8)
    assert degenerate_power_certificate(instances["dyadic"], table, 4, (5, 8)) is None
    par = condition3_table(instances["parity"], [3], 8)
    cert = degenerate_power_certificate(instances["parity"], par, 3, (5, 8))
    assert cert["progression"] == (6, 2) and cert["bound"] == Fraction(1, 19)


def test_missing_coverage_is_inconclusive(instances):
    # nothing at or above p0 = 64 is tabulated, and no certificate applies
    sched = [(Fraction(1, 100), 64, (5, 8))]
    v = approximability_verdict(instances["dyadic"], sched, P=[2, 4], N=8)
    assert v.status == INCONCLUSIVE


def test_growth_proxies(instances):
    g = growth_proxies(instances["triangle"], 20)
    assert g.window == 5
    assert g.liminf == Fraction(2 * 231, 400)
    assert g.limsup == Fraction(2 * 153, 256)
    d = growth_proxies(instances["dyadic"], 64, window=16)
    assert d.liminf <= d.limsup
    assert all(v == Fraction(m - digit_sum(m) + 1, m) for m, v in d.sequence)
