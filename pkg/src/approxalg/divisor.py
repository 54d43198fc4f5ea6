"""Pole divisors, the divisors D_m and truncated estimates of D(B) = limsup D_m / m.

D_m is computed prime by prime: ord_C is a valuation, so its minimum over
B_m is attained on any basis, and the coefficient of C in D_m is the largest
pole order along C among the echelon basis elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .algebra import CurveSectionRing, GeneratedSubalgebra, LaurentMonomial, ParitySlice, PolytopeSlice, Rescale
from .errors import ModelError, ValuationError
from .kernel import INFINITY, RationalFunctionElement, translate_terms


@dataclass(frozen=True, order=True)
class PrimeDivisor:
    """A point of the line (``kind`` 'point' or 'infinity') or a hyperplane x_i = 0."""

    kind: str
    value: object = None

    def __str__(self):
        if self.kind == "infinity":
            return "[inf]"
        if self.kind == "hyperplane":
            return f"[x{self.value + 1}=0]"
        return f"[{self.value}]"

    @classmethod
    def point(cls, q):
        if q is INFINITY:
            return cls("infinity", None)
        return cls("point", Fraction(q))

    @classmethod
    def hyperplane(cls, i: int):
        return cls("hyperplane", int(i))

    def sort_key(self):
        order = {"point": 0, "infinity": 1, "hyperplane": 2}[self.kind]
        return (order, self.value if self.value is not None else 0)


INF = PrimeDivisor.point(INFINITY)


@dataclass(frozen=True)
class FiniteDivisor:
    coefficients: dict  # PrimeDivisor -> int, zero entries dropped

    def __post_init__(self):
        object.__setattr__(self, "coefficients", {c: k for c, k in self.coefficients.items() if k})

    def __getitem__(self, prime) -> int:
        return self.coefficients.get(prime, 0)

    @property
    def support(self) -> list:
        return sorted(self.coefficients, key=PrimeDivisor.sort_key)

    def __len__(self):
        return len(self.coefficients)

    def __str__(self):
        if not self.coefficients:
            return "0"
        return " + ".join(f"{self[c]}*{c}" for c in self.support)


def _root(factor) -> Fraction:
    terms = factor.terms
    if factor.degree() != 1 or len(factor.variables) != 1:
        raise ModelError(f"curve denominators must be linear factors, got {factor!r}")
    return -terms.get((0,), Fraction(0)) / terms[(1,)]


def _poles(terms, factors, variables, geometry) -> dict:
    """Pole orders of numerator ``terms`` over the factored denominator."""
    out = {}
    if geometry == "curve":
        for f, k in factors:
            q = _root(f)
            vanish = min(e[0] for e in translate_terms(terms, (q,)))
            if k > vanish:
                out[PrimeDivisor.point(q)] = k - vanish
        deg_den = sum(k * f.degree() for f, k in factors)
        deg_num = max(e[0] for e in terms)
        if deg_num > deg_den:
            out[INF] = deg_num - deg_den
        return out
    if geometry == "laurent":
        for f, k in factors:
            (e,) = f.terms
            if sum(e) != 1 or len(f.terms) != 1:
                raise ModelError(f"Laurent denominators must be variables, got {f!r}")
            i = e.index(1)
            vanish = min(t[i] for t in terms)
            if k > vanish:
                out[PrimeDivisor.hyperplane(i)] = k - vanish
        return out
    raise ModelError(f"unknown geometry {geometry!r}")


def pole_divisor(f: RationalFunctionElement, geometry: str) -> FiniteDivisor:
    """The negative part (f)^- of div(f)."""
    if f.is_zero():
        raise ValuationError("the zero element has no divisor")
    return FiniteDivisor(_poles(f.numerator.terms, f.factors, f.variables, geometry))


def compute_Dm(model, m: int) -> FiniteDivisor:
    piece = model.graded_piece(m)
    if not piece.dim:
        raise ModelError(f"B_{m} of {model.name} is zero")
    best: dict = {}
    for row in piece.rows:
        for c, k in _poles(dict(row), piece.denominator, piece.variables, model.geometry).items():
            if k > best.get(c, 0):
                best[c] = k
    return FiniteDivisor(best)


@dataclass
class EstimateRecord:
    sup: Fraction
    argmax: int
    sequence: list  # (m, coefficient of D_m)


@dataclass
class DivisorEstimate:
    model: str
    M: int
    records: dict  # PrimeDivisor -> EstimateRecord
    divisors: dict  # m -> FiniteDivisor
    divisibility: dict = field(default_factory=dict)  # PrimeDivisor -> [(m, coeff / m)] for m | M

    @property
    def primes(self) -> list:
        return sorted(self.records, key=PrimeDivisor.sort_key)

    def sup_divisor(self) -> dict:
        return {c: self.records[c].sup for c in self.primes}

    def sup(self, prime) -> Fraction:
        rec = self.records.get(prime)
        return rec.sup if rec else Fraction(0)


def divisor_limit_estimate(model, M: int) -> DivisorEstimate:
    """Per-prime sup of coeff(D_m)/m over m <= M, with the m | M subsequence."""
    divisors = {m: compute_Dm(model, m) for m in range(1, M + 1) if model.rank(m)}
    primes = sorted({c for d in divisors.values() for c in d.coefficients}, key=PrimeDivisor.sort_key)
    records, chain = {}, {}
    for c in primes:
        seq = [(m, d[c]) for m, d in divisors.items()]
        best, arg = Fraction(-1), None
        for m, k in seq:
            if Fraction(k, m) > best:
                best, arg = Fraction(k, m), m
        records[c] = EstimateRecord(best, arg, seq)
        chain[c] = [(m, Fraction(d[c], m)) for m, d in divisors.items() if M % m == 0]
    return DivisorEstimate(model.name, M, records, divisors, chain)


def divisibility_pairs(M: int) -> list:
    return [(a, b) for b in range(1, M + 1) for a in range(1, b + 1) if b % a == 0]


@dataclass
class MonotonicityReport:
    model: str
    checked: list
    failures: list  # (m1, m2, prime, D_m1/m1, D_m2/m2)
    observations: list = field(default_factory=list)  # same shape, for non-divisible pairs

    @property
    def ok(self) -> bool:
        return not self.failures


def _normalized(model, m, cache):
    if m not in cache:
        cache[m] = compute_Dm(model, m) if model.rank(m) else None
    return cache[m]


def check_monotonicity(model, chains, observe_up_to: int | None = None) -> MonotonicityReport:
    """D_{m1}/m1 <= D_{m2}/m2 coefficientwise for every (m1, m2) with m1 | m2.

    With ``observe_up_to`` the same comparison is run on pairs m1 < m2 that
    are not divisibility-comparable; decreases there are recorded as data.
    """
    cache: dict = {}
    report = MonotonicityReport(model.name, [], [])
    for m1, m2 in chains:
        if m1 < 1 or m2 % m1:
            raise ValueError(f"{m1} does not divide {m2}")
        d1, d2 = _normalized(model, m1, cache), _normalized(model, m2, cache)
        report.checked.append((m1, m2))
        if d1 is None or d2 is None:
            continue
        for c in sorted(set(d1.coefficients) | set(d2.coefficients), key=PrimeDivisor.sort_key):
            a, b = Fraction(d1[c], m1), Fraction(d2[c], m2)
            if a > b:
                report.failures.append((m1, m2, c, a, b))
    if observe_up_to:
        for m2 in range(2, observe_up_to + 1):
            for m1 in range(1, m2):
                if m2 % m1 == 0:
                    continue
                d1, d2 = _normalized(model, m1, cache), _normalized(model, m2, cache)
                if d1 is None or d2 is None:
                    continue
                for c in sorted(set(d1.coefficients) | set(d2.coefficients), key=PrimeDivisor.sort_key):
                    a, b = Fraction(d1[c], m1), Fraction(d2[c], m2)
                    if a > b:
                        report.observations.append((m1, m2, c, a, b))
    return report


@dataclass
class InclusionReport:
    model: str
    estimate_M: int
    degrees: list
    failures: list  # (m, prime, pole order, floor(m * D_hat))
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_inclusion(model, estimate: DivisorEstimate, M: int | None = None, degrees=None) -> InclusionReport:
    """div(b) + floor(m D_hat) >= 0 for every basis element b of B_m, and D_m <= floor(m D_hat).

    D_hat is the estimate's sup divisor. Only poles can make the left side
    negative, so each basis element's pole orders are compared with
    floor(m D_hat) prime by prime.
    """
    degrees = list(degrees) if degrees is not None else list(range(1, (M or estimate.M) + 1))
    dhat = estimate.sup_divisor()
    report = InclusionReport(model.name, estimate.M, degrees, [])
    if max(degrees, default=0) > estimate.M:
        report.notes.append(f"degrees beyond the estimate's truncation {estimate.M}: failures are "
                            "truncation witnesses")
    for m in degrees:
        piece = model.graded_piece(m)
        if not piece.dim:
            continue
        allowed = {c: floor(m * a) for c, a in dhat.items()}
        worst: dict = {}
        for row in piece.rows:
            for c, k in _poles(dict(row), piece.denominator, piece.variables, model.geometry).items():
                worst[c] = max(worst.get(c, 0), k)
        # worst is D_m, so this covers both the element-wise and the D_m check
        for c in sorted(worst, key=PrimeDivisor.sort_key):
            if worst[c] > allowed.get(c, 0):
                report.failures.append((m, c, worst[c], allowed.get(c, 0)))
    return report


def _ambient_divisor(model):
    """(infinite divisor spec, scale) of the curve ring containing ``model``, or None."""
    scale = 1
    while True:
        if isinstance(model, Rescale):
            scale *= model.k
            model = model.base
        elif isinstance(model, GeneratedSubalgebra):
            model = model.ambient
        elif isinstance(model, CurveSectionRing):
            return model.divisor, scale
        else:
            return None


def analytic_bound(model, prime: PrimeDivisor):
    """Upper bound for coeff(C, D_m)/m valid for every m, or None if unknown.

    Curve models inside L(floor(mD)): the coefficient of D at C (scaled for
    rescaled models). Monomial models: the polytope's deepest negative
    exponent along the hyperplane; parity slices have no poles.
    """
    amb = _ambient_divisor(model)
    if amb is not None:
        div, scale = amb
        q = INFINITY if prime.kind == "infinity" else prime.value
        return scale * div.coefficient(q)
    base, scale = model, 1
    while isinstance(base, (Rescale, GeneratedSubalgebra)):
        if isinstance(base, Rescale):
            scale *= base.k
            base = base.base
        else:
            base = base.ambient
    if isinstance(base, LaurentMonomial) and prime.kind == "hyperplane":
        rule = base.slice_rule
        if isinstance(rule, ParitySlice):
            return Fraction(0)
        if isinstance(rule, PolytopeSlice):
            return scale * max(Fraction(0), -min(v[prime.value] for v in rule.polytope.vertices))
    return None


@dataclass
class DecayReport:
    model: str
    M: int
    coefficients: list  # (prime, sup) sorted descending
    counts: dict  # l -> #{primes with sup >= 1/l}
    analytic_counts: dict | None = None  # l -> #{prime divisors of D with coefficient >= 1/l}
    notes: list = field(default_factory=list)


def coefficient_decay(estimate: DivisorEstimate, model=None, levels: int = 10) -> DecayReport:
    coeffs = sorted(estimate.sup_divisor().items(), key=lambda cv: (-cv[1], cv[0].sort_key()))
    counts = {l: sum(1 for _, a in coeffs if a >= Fraction(1, l)) for l in range(1, levels + 1)}
    report = DecayReport(estimate.model, estimate.M, coeffs, counts)
    amb = _ambient_divisor(model) if model is not None else None
    if amb is not None:
        div, scale = amb
        if div.convergent:
            report.analytic_counts = {
                l: sum(1 for _, a in div.support if scale * a >= Fraction(1, l))
                + div.tail_count(Fraction(1, l * scale))
                for l in range(1, levels + 1)
            }
            report.notes.append("analytic counts are for the ambient divisor D; each is finite "
                                "because the tail coefficients decrease to 0")
    return report
