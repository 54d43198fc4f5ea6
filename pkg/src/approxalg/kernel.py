"""Exact arithmetic over the rationals.

Sparse multivariate polynomials, rational functions whose denominators are
kept as declared factorizations, and reduced row-echelon bases of finite
dimensional spaces of such functions.

Scalars are :class:`fractions.Fraction` throughout; nothing here touches
floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

from .errors import ModelError

Scalar = Fraction
Exp = tuple  # exponent vector, tuple of non-negative ints


def as_scalar(value) -> Fraction:
    """Coerce ints, Fractions and 'a/b' strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact or boolean scalar {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational scalar")


def grlex_key(e: Exp):
    return (sum(e), e)


class _Infinity:
    """The point at infinity of the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def parse_point(value):
    if value is INFINITY or (isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞")):
        return INFINITY
    return as_scalar(value)


# -- term-dict helpers -------------------------------------------------------

def _add_scaled(acc: dict, terms: Mapping, scale=1) -> None:
    for e, c in terms.items():
        v = acc.get(e, 0) + scale * c
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def _mul_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


@lru_cache(maxsize=4096)
def _shifted_power(k: int, c: Fraction) -> tuple:
    # coefficients of (y + c)^k, index j -> coefficient of y^j
    return tuple(comb(k, j) * c ** (k - j) for j in range(k + 1))


def translate_terms(terms: Mapping, center) -> dict:
    """Substitute x_i -> x_i + center_i."""
    if all(c == 0 for c in center):
        return dict(terms)
    n = len(center)
    out: dict = {}
    for e, coeff in terms.items():
        partial = {(0,) * n: coeff}
        for i, (k, c) in enumerate(zip(e, center)):
            if k == 0:
                continue
            if c == 0:
                partial = {p[:i] + (k,) + p[i + 1:]: v for p, v in partial.items()}
                continue
            expansion = _shifted_power(k, c)
            nxt: dict = {}
            for p, v in partial.items():
                for j, w in enumerate(expansion):
                    if w:
                        q = p[:i] + (j,) + p[i + 1:]
                        nxt[q] = nxt.get(q, 0) + v * w
            partial = nxt
        _add_scaled(out, partial)
    return out


# -- polynomials -------------------------------------------------------------

class Poly:
    """Sparse polynomial with Fraction coefficients in an ordered variable list.

    Treated as immutable: arithmetic returns new objects.
    """

    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables, terms: Mapping | None = None):
        self.variables = tuple(variables)
        clean = {}
        n = len(self.variables)
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or any(x < 0 for x in e):
                raise ModelError(f"bad exponent vector {e} for variables {self.variables}")
            c = as_scalar(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self._terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def constant(cls, variables, c=1) -> Poly:
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables, name) -> Poly:
        variables = tuple(variables)
        if name not in variables:
            raise ModelError(f"unknown variable {name!r}")
        i = variables.index(name)
        return cls(variables, {tuple(int(j == i) for j in range(len(variables))): 1})

    @classmethod
    def monomial(cls, variables, exps, coeff=1) -> Poly:
        return cls(variables, {tuple(exps): coeff})

    @classmethod
    def linear(cls, point, variables=("x",)) -> Poly:
        """The factor x - point of the projective line's affine chart."""
        return cls(variables, {(1,): 1, (0,): -as_scalar(point)})

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial")
        return max(sum(e) for e in self._terms)

    def coefficient(self, exps) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                v *= as_scalar(x) ** k
            total += v
        return total

    def translate(self, center) -> Poly:
        if len(center) != len(self.variables):
            raise ModelError("center length does not match variable count")
        return Poly(self.variables, translate_terms(self._terms, [as_scalar(c) for c in center]))

    def sort_key(self):
        return tuple(sorted((grlex_key(e), c) for e, c in self._terms.items()))

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise ModelError(f"mixed variable sets {self.variables} and {other.variables}")
            return other
        return Poly.constant(self.variables, as_scalar(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        _add_scaled(out, other._terms)
        return Poly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._coerce(other)
            return Poly(self.variables, _mul_terms(self._terms, other._terms))
        c = as_scalar(other)
        return Poly(self.variables, {e: c * v for e, v in self._terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.constant(self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(self.variables, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e in sorted(self._terms, key=grlex_key, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@lru_cache(maxsize=8192)
def _factor_power_terms(factor: Poly, k: int):
    return (factor ** k).terms


def _merge(a: Mapping, b: Mapping, op) -> dict:
    out = dict(a)
    for f, k in b.items():
        out[f] = op(out.get(f, 0), k)
    return {f: k for f, k in out.items() if k}


def _canonical_factors(factors: Mapping) -> tuple:
    return tuple(sorted(((f, k) for f, k in factors.items() if k), key=lambda fk: fk[0].sort_key()))


def _clear_to(terms: Mapping, own: Mapping, common: Mapping) -> dict:
    """Rewrite terms/own as numerator over the common denominator."""
    out = dict(terms)
    for f, k in common.items():
        extra = k - own.get(f, 0)
        if extra < 0:
            raise ModelError("common denominator does not dominate")
        if extra:
            out = _mul_terms(out, _factor_power_terms(f, extra))
    return out


# -- rational functions ------------------------------------------------------

class RationalFunctionElement:
    """numerator / prod(factor^multiplicity) with the factorization declared.

    Factors are not checked for irreducibility; callers declare linear
    factors on the line and single variables on Laurent models.
    """

    __slots__ = ("numerator", "factors")

    def __init__(self, numerator: Poly, factors: Mapping | Iterable = ()):
        if isinstance(factors, Mapping):
            items = factors.items()
        else:
            items = factors
        merged: dict = {}
        for f, k in items:
            if not isinstance(f, Poly):
                raise ModelError("denominator factors must be polynomials")
            if f.variables != numerator.variables:
                raise ModelError("denominator factor over a different variable set")
            if f.is_zero() or f.degree() == 0:
                raise ModelError(f"declared factor {f!r} is constant")
            if k < 0:
                raise ModelError("negative factor multiplicity")
            merged[f] = merged.get(f, 0) + int(k)
        self.numerator = numerator
        self.factors = () if numerator.is_zero() else _canonical_factors(merged)

    @classmethod
    def constant(cls, variables, c=1):
        return cls(Poly.constant(variables, c))

    @property
    def variables(self):
        return self.numerator.variables

    @property
    def denominator(self) -> Poly:
        d = Poly.constant(self.variables)
        for f, k in self.factors:
            d = d * f ** k
        return d

    @property
    def denominator_factorization(self) -> list:
        return list(self.factors)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFunctionElement):
            if other.variables != self.variables:
                raise ModelError("mixed variable sets")
            return other
        if isinstance(other, Poly):
            return RationalFunctionElement(self.numerator._coerce(other))
        return RationalFunctionElement(Poly.constant(self.variables, as_scalar(other)))

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunctionElement(
            self.numerator * other.numerator,
            _merge(dict(self.factors), dict(other.factors), lambda a, b: a + b),
        )

    __rmul__ = __mul__

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        own, theirs = dict(self.factors), dict(other.factors)
        common = _merge(own, theirs, max)
        num = dict(_clear_to(self.numerator.terms, own, common))
        _add_scaled(num, _clear_to(other.numerator.terms, theirs, common))
        return RationalFunctionElement(Poly(self.variables, num), common)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunctionElement(-self.numerator, self.factors)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __truediv__(self, c):
        return self * (1 / as_scalar(c))

    def __eq__(self, other):
        if not isinstance(other, (RationalFunctionElement, Poly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        own, theirs = dict(self.factors), dict(other.factors)
        common = _merge(own, theirs, max)
        return _clear_to(self.numerator.terms, own, common) == _clear_to(
            other.numerator.terms, theirs, common
        )

    __hash__ = None

    def __repr__(self):
        if not self.factors:
            return f"({self.numerator!r})"
        den = "*".join(f"({f!r})" if k == 1 else f"({f!r})^{k}" for f, k in self.factors)
        return f"({self.numerator!r})/{den}"


def monomial_element(variables, exps, coeff=1) -> RationalFunctionElement:
    """Laurent monomial; negative exponents become declared variable factors."""
    variables = tuple(variables)
    num = tuple(max(e, 0) for e in exps)
    factors = {}
    for i, e in enumerate(exps):
        if e < 0:
            factors[Poly.variable(variables, variables[i])] = -e
    return RationalFunctionElement(Poly.monomial(variables, num, coeff), factors)


# -- echelon forms -----------------------------------------------------------

class Echelon:
    """Incremental sparse reduced row echelon form.

    Rows are dicts column -> Fraction. The pivot of a row is its
    key-minimal column; the stored rows stay fully reduced after every
    insertion.
    """

    def __init__(self, key: Callable = grlex_key):
        self.key = key
        self.pivots: dict = {}
        self._cols: set = set()  # superset of non-pivot columns present in stored rows

    def __len__(self):
        return len(self.pivots)

    def reduce(self, row: Mapping) -> dict:
        row = dict(row)
        for c in [c for c in row if c in self.pivots]:
            f = row.get(c)
            if not f:
                continue
            for col, v in self.pivots[c].items():
                nv = row.get(col, 0) - f * v
                if nv:
                    row[col] = nv
                else:
                    row.pop(col, None)
        return row

    def insert(self, row: Mapping) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        lead = min(row, key=self.key)
        lc = row[lead]
        if lc != 1:
            row = {c: Fraction(v) / lc for c, v in row.items()}
        for prow in self.pivots.values() if lead in self._cols else ():
            f = prow.get(lead)
            if f:
                for col, v in row.items():
                    nv = prow.get(col, 0) - f * v
                    if nv:
                        prow[col] = nv
                    else:
                        prow.pop(col, None)
        self.pivots[lead] = row
        self._cols.update(c for c in row if c != lead)
        return True

    def sorted_rows(self) -> list:
        return [self.pivots[p] for p in sorted(self.pivots, key=self.key)]


@dataclass(frozen=True)
class Basis:
    """Reduced echelon basis of a space of rational functions.

    All rows are numerators over the common ``denominator`` factorization;
    rows are sorted by pivot under graded-lex order, and each row's terms
    are listed in the same order.
    """

    variables: tuple
    denominator: tuple
    rows: tuple

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self) -> list:
        return [r[0][0] for r in self.rows]

    @property
    def support(self) -> list:
        cols = {e for r in self.rows for e, _ in r}
        return sorted(cols, key=grlex_key)

    @property
    def numerators(self) -> list:
        return [dict(r) for r in self.rows]

    @property
    def elements(self) -> list:
        return [RationalFunctionElement(Poly(self.variables, dict(r)), self.denominator) for r in self.rows]


def _basis_from(variables, denominator: Mapping, ech: Echelon) -> Basis:
    rows = tuple(
        tuple(sorted(((e, Fraction(c)) for e, c in r.items()), key=lambda ec: grlex_key(ec[0])))
        for r in ech.sorted_rows()
    )
    return Basis(tuple(variables), _canonical_factors(denominator) if rows else (), rows)


def zero_basis(variables) -> Basis:
    return Basis(tuple(variables), (), ())


def span_of(variables, items: Iterable) -> Basis:
    """Echelon basis of the span of (numerator terms, denominator factors) pairs."""
    items = [(t, dict(d)) for t, d in items if t]
    common: dict = {}
    for _, d in items:
        common = _merge(common, d, max)
    ech = Echelon(grlex_key)
    for t, d in items:
        ech.insert(_clear_to(t, d, common))
    return _basis_from(variables, common, ech)


def _check_variables(elements, variables=None):
    seen = {f.variables for f in elements}
    if variables is not None:
        seen.add(tuple(variables))
    if len(seen) > 1:
        raise ModelError(f"mixed variable sets: {sorted(seen)}")
    return seen.pop() if seen else ()


def echelonize(elements: Iterable[RationalFunctionElement], variables=None) -> Basis:
    elements = list(elements)
    variables = _check_variables(elements, variables)
    return span_of(variables, ((f.numerator.terms, dict(f.factors)) for f in elements))


def product_space(a: Basis, b: Basis) -> Basis:
    """Basis of span{f*g : f in a, g in b}."""
    if a.variables != b.variables and a.dim and b.dim:
        raise ModelError(f"mixed variable sets {a.variables} and {b.variables}")
    if not a.dim or not b.dim:
        return zero_basis(a.variables or b.variables)
    den = _merge(dict(a.denominator), dict(b.denominator), lambda x, y: x + y)
    if all(len(r) == 1 for r in a.rows) and all(len(r) == 1 for r in b.rows):
        # monomial rows: the product span is spanned by the distinct exponent sums
        exps = {tuple(x + y for x, y in zip(ra[0][0], rb[0][0])) for ra in a.rows for rb in b.rows}
        rows = tuple(((e, Fraction(1)),) for e in sorted(exps, key=grlex_key))
        return Basis(a.variables, _canonical_factors(den), rows)
    ech = Echelon(grlex_key)
    for ra in a.rows:
        for rb in b.rows:
            ech.insert(_mul_terms(dict(ra), dict(rb)))
    return _basis_from(a.variables, den, ech)


def spans_equal(a: Basis, b: Basis) -> bool:
    if a.dim != b.dim:
        return False
    if a == b:
        return True
    return echelonize(a.elements + b.elements, a.variables or b.variables).dim == a.dim


def contains(basis: Basis, f: RationalFunctionElement) -> bool:
    if f.is_zero():
        return True
    return echelonize(basis.elements + [f], f.variables).dim == basis.dim
