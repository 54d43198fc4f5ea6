"""Flag multivaluations on the projective line and on coordinate charts.

A flag is either a point of the line (finite or at infinity) or a
coordinate flag: an ordering of the variables and a rational center.
After moving the center to the origin, the inductive vanishing-order
definition reduces to taking the lexicographically smallest exponent of a
polynomial under the flag's variable order, so

    nu(num / prod f_j^k_j) = nu(num) - sum k_j nu(f_j).

Valuation vectors are plain tuples of ints; tuple comparison is the
lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import FlagError, ValuationError
from .kernel import (
    INFINITY,
    Basis,
    Echelon,
    Poly,
    RationalFunctionElement,
    as_scalar,
    parse_point,
    translate_terms,
)

ValuationVector = tuple


@dataclass(frozen=True)
class CurvePoint:
    point: object  # Fraction or INFINITY

    def __post_init__(self):
        object.__setattr__(self, "point", parse_point(self.point))

    @property
    def dimension(self) -> int:
        return 1

    def __str__(self):
        return f"point({self.point})"


@dataclass(frozen=True)
class CoordinateFlag:
    order: tuple
    center: tuple = None

    def __post_init__(self):
        order = tuple(int(i) for i in self.order)
        if sorted(order) != list(range(len(order))):
            raise FlagError(f"variable order {order} is not a permutation")
        center = self.center
        if center is None:
            center = (0,) * len(order)
        center = tuple(as_scalar(c) for c in center)
        if len(center) != len(order):
            raise FlagError("center and variable order have different lengths")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "center", center)

    @property
    def dimension(self) -> int:
        return len(self.order)

    def __str__(self):
        return f"coordinate({list(self.order)}, {[str(c) for c in self.center]})"


def _local(flag, nvars: int):
    """(center, key) for a flag: translate by center, then key-min exponent."""
    if isinstance(flag, CurvePoint):
        if nvars != 1:
            raise FlagError("a curve point applies only to univariate elements")
        if flag.point is INFINITY:
            return (Fraction(0),), (lambda e: (-e[0],))
        return (flag.point,), (lambda e: (e[0],))
    if isinstance(flag, CoordinateFlag):
        if flag.dimension != nvars:
            raise FlagError(f"flag of dimension {flag.dimension} applied to {nvars} variables")
        order = flag.order
        return flag.center, (lambda e: tuple(e[i] for i in order))
    raise FlagError(f"unknown flag {flag!r}")


def _poly_valuation(terms: Mapping, center, key) -> tuple:
    local = translate_terms(terms, center)
    if not local:
        raise FlagError("restriction vanished identically")
    return key(min(local, key=key))


def _den_valuation(factors, center, key, d) -> list:
    out = [0] * d
    for f, k in factors:
        v = _poly_valuation(f.terms, center, key)
        for i in range(d):
            out[i] += k * v[i]
    return out


def multivaluation(f: RationalFunctionElement, flag) -> ValuationVector:
    if f.is_zero():
        raise ValuationError("the valuation of 0 is undefined")
    center, key = _local(flag, len(f.variables))
    num = _poly_valuation(f.numerator.terms, center, key)
    den = _den_valuation(f.factors, center, key, len(num))
    return tuple(a - b for a, b in zip(num, den))


@dataclass(frozen=True)
class ValuationImage:
    vectors: tuple
    representatives: dict = field(compare=False)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __contains__(self, v):
        return tuple(v) in self.representatives


def valuation_image(v: Basis, flag) -> ValuationImage:
    """All values of the flag valuation on the nonzero elements of ``v``.

    Valuation-echelon reduction: numerators share the basis denominator, so
    it suffices to put the numerators, written in local coordinates, into
    echelon form with respect to the flag order. Collisions are removed by
    subtracting the exact ratio of leading coefficients; the pivots are the
    distinct values.
    """
    if not v.dim:
        return ValuationImage((), {})
    nvars = len(v.variables)
    center, key = _local(flag, nvars)
    d = len(key((0,) * nvars))
    den = _den_valuation(v.denominator, center, key, d)
    ech = Echelon(key)
    for row in v.rows:
        ech.insert(translate_terms(dict(row), center))
    back = tuple(-c for c in center)
    reps = {}
    for p, row in ech.pivots.items():
        vec = tuple(a - b for a, b in zip(key(p), den))
        num = Poly(v.variables, translate_terms(row, back))
        reps[vec] = RationalFunctionElement(num, v.denominator)
    return ValuationImage(tuple(sorted(reps)), reps)
