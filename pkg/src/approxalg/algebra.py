"""Computable graded algebras B = (+)_m B_m and the shipped instance library.

Four model kinds:

* :class:`CurveSectionRing` -- B_m = L(floor(m D)) on the projective line for
  an infinite divisor D with a certified tail, so floor(m D) has finite
  support for each m.
* :class:`LaurentMonomial` -- B_m spanned by the Laurent monomials whose
  exponents lie in a named slice rule S_m.
* :class:`GeneratedSubalgebra` -- generated by finitely many homogeneous
  elements of an ambient model.
* :class:`Rescale` -- the Veronese-type subalgebra (+)_n B_{kn}.

Graded pieces are :class:`~approxalg.kernel.Basis` values and are memoised
per model; every fill is deterministic, so concurrent fills agree.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .errors import ModelError, TruncationError, ValidationError
from .kernel import (
    INFINITY,
    Basis,
    _canonical_factors,
    grlex_key,
    zero_basis,
    Poly,
    RationalFunctionElement,
    as_scalar,
    contains,
    echelonize,
    monomial_element,
    parse_point,
    product_space,
    span_of,
)
from .polytope import Polytope, convex_hull, lattice_points
from .valuation import CoordinateFlag, CurvePoint

DEFAULT_TRUNCATION = 1024
CURVE_VARIABLES = ("x",)


# -- infinite divisors on the line ----------------------------------------------

@dataclass(frozen=True)
class GeometricTail:
    """a_i = scale * ratio**(i-1); ``points`` lists the first tail points."""

    scale: Fraction
    ratio: Fraction
    points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "scale", as_scalar(self.scale))
        object.__setattr__(self, "ratio", as_scalar(self.ratio))
        object.__setattr__(self, "points", tuple(parse_point(p) for p in self.points))
        if self.scale <= 0:
            raise ModelError("geometric tail needs a positive scale")
        if not 0 < self.ratio < 1:
            raise ModelError("geometric tail ratio must lie in (0, 1)")

    convergent = True

    def coefficient(self, i: int) -> Fraction:
        return self.scale * self.ratio ** (i - 1)

    def sum_bound(self) -> Fraction:
        return self.scale / (1 - self.ratio)

    def describe(self) -> str:
        return f"geometric({self.scale}, {self.ratio})"


@dataclass(frozen=True)
class PowerTail:
    """a_i = scale / i**exponent; summable only for exponent >= 2."""

    scale: Fraction
    exponent: int
    points: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "scale", as_scalar(self.scale))
        object.__setattr__(self, "exponent", int(self.exponent))
        object.__setattr__(self, "points", tuple(parse_point(p) for p in self.points))
        if self.scale <= 0 or self.exponent < 1:
            raise ModelError("power tail needs positive scale and exponent >= 1")

    @property
    def convergent(self) -> bool:
        return self.exponent >= 2

    def coefficient(self, i: int) -> Fraction:
        return self.scale / i ** self.exponent

    def sum_bound(self):
        # sum_{i>=1} i^-k <= 1 + 1/(k-1)
        if not self.convergent:
            return None
        return self.scale * (1 + Fraction(1, self.exponent - 1))

    def describe(self) -> str:
        return f"power({self.scale}, {self.exponent})"


def _positive_integer(q) -> bool:
    return isinstance(q, Fraction) and q.denominator == 1 and q > 0


@dataclass(frozen=True)
class InfiniteDivisorSpec:
    """D = sum of explicit (point, coefficient) terms plus an optional tail.

    Tail points beyond the declared prefix run through the positive integers
    not already used, so p_i = i when nothing else is declared.
    """

    support: tuple = ()
    tail: object = None

    def __post_init__(self):
        support = tuple((parse_point(p), as_scalar(a)) for p, a in self.support)
        pts = [p for p, _ in support]
        if len(set(pts)) != len(pts):
            raise ModelError("duplicate support point")
        if any(a <= 0 for _, a in support):
            raise ModelError("support coefficients must be positive")
        if self.tail is not None:
            prefix = list(self.tail.points)
            if len(set(prefix)) != len(prefix):
                raise ModelError("duplicate support point")
            if set(prefix) & set(pts):
                raise ModelError("tail points overlap the explicit support")
            if INFINITY in prefix:
                raise ModelError("the point at infinity cannot be a tail point")
        object.__setattr__(self, "support", support)
        used = set(pts) | set(self.tail.points if self.tail else ())
        object.__setattr__(self, "_used_ints", tuple(sorted(int(p) for p in used if _positive_integer(p))))

    def tail_point(self, i: int):
        prefix = self.tail.points
        if i <= len(prefix):
            return prefix[i - 1]
        n = i - len(prefix)
        for u in self._used_ints:
            if u <= n:
                n += 1
        return Fraction(n)

    def tail_index(self, q):
        """Index i with tail_point(i) == q, or None."""
        if self.tail is None:
            return None
        if q in self.tail.points:
            return self.tail.points.index(q) + 1
        if not _positive_integer(q) or int(q) in self._used_ints:
            return None
        below = sum(1 for u in self._used_ints if u < q)
        return len(self.tail.points) + int(q) - below

    def coefficient(self, q) -> Fraction:
        q = parse_point(q)
        for p, a in self.support:
            if p == q:
                return a
        i = self.tail_index(q)
        return self.tail.coefficient(i) if i else Fraction(0)

    def contains_point(self, q) -> bool:
        return self.coefficient(q) > 0

    def tail_count(self, threshold: Fraction) -> int:
        """Number of tail indices i with a_i >= threshold (coefficients decrease)."""
        if self.tail is None:
            return 0
        i = 0
        while self.tail.coefficient(i + 1) >= threshold:
            i += 1
        return i

    def floor_divisor(self, m: int) -> dict:
        out = {}
        for p, a in self.support:
            e = floor(m * a)
            if e:
                out[p] = e
        for i in range(1, self.tail_count(Fraction(1, m)) + 1 if m > 0 else 1):
            e = floor(m * self.tail.coefficient(i))
            if e:
                out[self.tail_point(i)] = e
        return out

    @property
    def convergent(self) -> bool:
        return self.tail is None or self.tail.convergent

    def degree_bound(self):
        """Rational upper bound on deg D, or None for a divergent tail."""
        total = sum((a for _, a in self.support), Fraction(0))
        if self.tail is None:
            return total
        b = self.tail.sum_bound()
        return None if b is None else total + b

    def describe(self) -> str:
        parts = [f"{a}*[{p}]" for p, a in self.support]
        if self.tail is not None:
            parts.append(f"tail {self.tail.describe()} from points {list(map(str, self.tail.points))}")
        return " + ".join(parts) if parts else "0"


# -- models ---------------------------------------------------------------------

class GradedAlgebraModel:
    kind = "abstract"

    def __init__(self, name, dimension, variables, geometry, truncation=DEFAULT_TRUNCATION, metadata=None):
        if dimension < 1:
            raise ModelError("model dimension must be positive")
        self.name = name
        self.dimension = int(dimension)
        self.variables = tuple(variables)
        self.geometry = geometry
        self.truncation = int(truncation)
        self.metadata = dict(metadata or {})
        self._pieces: dict = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} d={self.dimension}>"

    def graded_piece(self, m: int) -> Basis:
        if m < 0:
            raise ValueError("negative degree")
        if m > self.truncation:
            raise TruncationError(f"degree {m} exceeds truncation {self.truncation} of {self.name}")
        piece = self._pieces.get(m)
        if piece is None:
            piece = self._pieces.setdefault(m, self._compute_piece(m))
        return piece

    def rank(self, m: int) -> int:
        return self.graded_piece(m).dim

    def _compute_piece(self, m: int) -> Basis:
        raise NotImplementedError

    def flag_conflicts(self, flag) -> list:
        """Reasons why ``flag`` is not an admissible choice here (empty if fine)."""
        out = []
        if flag.dimension != self.dimension or (
            isinstance(flag, CoordinateFlag) and len(self.variables) != flag.dimension
        ):
            return [f"flag dimension {flag.dimension} != model dimension {self.dimension}"]
        if isinstance(flag, CurvePoint):
            if flag.point is INFINITY:
                return out
            center = (flag.point,)
        else:
            center = flag.center
        for f in sorted(self._sampled_factors(), key=lambda f: f.sort_key()):
            if f.evaluate(center) == 0:
                out.append(f"center {tuple(map(str, center))} lies on the denominator locus {f!r}=0")
        return out

    def _sampled_factors(self, upto: int = 16) -> set:
        seen = set()
        for m in range(0, min(upto, self.truncation) + 1):
            seen.update(f for f, _ in self.graded_piece(m).denominator)
        return seen

    def default_flag(self):
        return CoordinateFlag(tuple(range(self.dimension)))

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind, "dimension": self.dimension,
                "geometry": self.geometry, "truncation": self.truncation}


class CurveSectionRing(GradedAlgebraModel):
    """B_m = L(floor(m D)) on the projective line."""

    kind = "curve"

    def __init__(self, divisor: InfiniteDivisorSpec, name="curve", truncation=DEFAULT_TRUNCATION,
                 metadata=None, require_convergent=True):
        if require_convergent and not divisor.convergent:
            raise ModelError("divisor tail is not summable; its class does not converge")
        super().__init__(name, 1, CURVE_VARIABLES, "curve", truncation, metadata)
        self.divisor = divisor

    def _compute_piece(self, m):
        floor_div = self.divisor.floor_divisor(m)
        e_inf = floor_div.pop(INFINITY, 0)
        top = sum(floor_div.values()) + e_inf
        den = {Poly.linear(p): e for p, e in floor_div.items()}
        return span_of(CURVE_VARIABLES, (({(j,): Fraction(1)}, den) for j in range(top + 1)))

    def flag_conflicts(self, flag):
        if isinstance(flag, CoordinateFlag):
            if flag.dimension != 1:
                return [f"flag dimension {flag.dimension} != 1"]
            flag = CurvePoint(flag.center[0])
        if not isinstance(flag, CurvePoint):
            return [f"unsupported flag {flag!r}"]
        if self.divisor.contains_point(flag.point):
            return [f"point {flag.point} lies in the support of D"]
        return []

    def default_flag(self):
        if not self.divisor.contains_point(INFINITY):
            return CurvePoint(INFINITY)
        q = -1
        while self.divisor.contains_point(q):
            q -= 1
        return CurvePoint(q)

    def describe(self):
        d = super().describe()
        d["divisor"] = self.divisor.describe()
        return d


class ParitySlice:
    """S_m = {0..m} for even m and {0} for odd m (one variable)."""

    name = "parity"
    dimension = 1

    def exponents(self, m):
        return [(a,) for a in range(m + 1)] if m % 2 == 0 else [(0,)]


class PolytopeSlice:
    """S_m = lattice points of m * P."""

    name = "polytope"

    def __init__(self, vertices):
        self.polytope: Polytope = convex_hull(vertices)
        self.dimension = self.polytope.dimension

    def exponents(self, m):
        if m == 0:
            return [(0,) * self.dimension]
        return lattice_points(self.polytope, m)


class CustomSlice:
    def __init__(self, name, dimension, rule):
        self.name = name
        self.dimension = dimension
        self._rule = rule

    def exponents(self, m):
        return [tuple(e) for e in self._rule(m)]


class LaurentMonomial(GradedAlgebraModel):
    kind = "monomial"

    def __init__(self, slice_rule, variables=None, name=None, truncation=DEFAULT_TRUNCATION, metadata=None):
        d = slice_rule.dimension
        if variables is None:
            variables = ("x",) if d == 1 else tuple(f"x{i + 1}" for i in range(d))
        if len(variables) != d:
            raise ModelError("variable count does not match slice dimension")
        super().__init__(name or slice_rule.name, d, variables, "laurent", truncation, metadata)
        self.slice_rule = slice_rule

    def _compute_piece(self, m):
        # distinct monomials are already a reduced echelon basis once the
        # negative exponents are cleared into a common x_i^c_i denominator
        exps = sorted(set(tuple(int(a) for a in e) for e in self.slice_rule.exponents(m)))
        if not exps:
            return zero_basis(self.variables)
        shift = [max(0, -min(e[i] for e in exps)) for i in range(self.dimension)]
        den = _canonical_factors({Poly.variable(self.variables, v): c for v, c in zip(self.variables, shift) if c})
        rows = [tuple(a + c for a, c in zip(e, shift)) for e in exps]
        rows.sort(key=grlex_key)
        return Basis(self.variables, den, tuple(((e, Fraction(1)),) for e in rows))

    def describe(self):
        d = super().describe()
        d["slice"] = self.slice_rule.name
        if isinstance(self.slice_rule, PolytopeSlice):
            d["vertices"] = [tuple(map(str, v)) for v in self.slice_rule.polytope.vertices]
        return d


class GeneratedSubalgebra(GradedAlgebraModel):
    """Subalgebra of ``ambient`` generated by homogeneous elements.

    B_m = sum over generators g of degree d of g * B_{m-d}, filled in
    increasing m and echelonized at every degree.
    """

    kind = "generated"

    def __init__(self, ambient: GradedAlgebraModel, generators, name=None, truncation=None, metadata=None):
        gens = []
        for deg, g in generators:
            deg = int(deg)
            if deg < 1:
                raise ModelError("generators need positive degree")
            if g.variables != ambient.variables:
                raise ModelError("generator over a different variable set")
            if g.is_zero():
                continue
            if not contains(ambient.graded_piece(deg), g):
                raise ModelError(f"generator {g!r} does not lie in degree {deg} of {ambient.name}")
            gens.append((deg, g))
        if not gens:
            raise ModelError("no nonzero generators")
        super().__init__(name or f"generated({ambient.name})", ambient.dimension, ambient.variables,
                         ambient.geometry, truncation or ambient.truncation, metadata)
        self.ambient = ambient
        self.generators = tuple(gens)

    def _compute_piece(self, m):
        if m == 0:
            return echelonize([RationalFunctionElement.constant(self.variables)])
        for j in range(1, m):
            self.graded_piece(j)
        items = []
        for deg, g in self.generators:
            if deg > m:
                continue
            for f in self.graded_piece(m - deg).elements:
                prod = g * f
                items.append((prod.numerator.terms, dict(prod.factors)))
        return span_of(self.variables, items)

    def flag_conflicts(self, flag):
        return self.ambient.flag_conflicts(flag)

    def default_flag(self):
        return self.ambient.default_flag()


class Rescale(GradedAlgebraModel):
    """Degree-n piece is B_{kn} of the base."""

    kind = "rescale"

    def __init__(self, base: GradedAlgebraModel, k: int, name=None):
        if k < 1:
            raise ModelError("rescaling factor must be positive")
        super().__init__(name or f"{base.name}[x{k}]", base.dimension, base.variables, base.geometry,
                         base.truncation // k, base.metadata)
        self.base = base
        self.k = int(k)

    def _compute_piece(self, m):
        return self.base.graded_piece(self.k * m)

    def flag_conflicts(self, flag):
        return self.base.flag_conflicts(flag)

    def default_flag(self):
        return self.base.default_flag()


# -- operations -----------------------------------------------------------------

def graded_piece(model: GradedAlgebraModel, m: int) -> Basis:
    return model.graded_piece(m)


def _check_power_range(model, p, n):
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    if n * p > model.truncation:
        raise TruncationError(f"degree {n * p} exceeds truncation {model.truncation} of {model.name}")


def power_image(model: GradedAlgebraModel, p: int, n: int) -> Basis:
    """S^n(B_p), the image of Sym^n B_p in B_{np}, by repeated squaring."""
    _check_power_range(model, p, n)
    base = model.graded_piece(p)
    result = None
    while n:
        if n & 1:
            result = base if result is None else product_space(result, base)
        n >>= 1
        if n:
            base = product_space(base, base)
    return result


def power_chain(model: GradedAlgebraModel, p: int, n_max: int) -> list:
    """[S^1 B_p, ..., S^n_max B_p] by successive multiplication with B_p."""
    _check_power_range(model, p, n_max)
    piece = model.graded_piece(p)
    out = [piece]
    for _ in range(n_max - 1):
        out.append(product_space(out[-1], piece))
    return out


def subalgebra_rescale(model: GradedAlgebraModel, k: int) -> GradedAlgebraModel:
    return Rescale(model, k)


@dataclass
class ValidationFailure:
    check: str
    message: str
    severity: str = "finding"  # "error" aborts instance parsing
    witness: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    model: str
    failures: list = field(default_factory=list)
    first_nonempty: int | None = None
    zero_degrees: list = field(default_factory=list)
    closure_samples: int = 0
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def fatal(self) -> bool:
        return any(f.severity == "error" for f in self.failures)

    def lines(self) -> list:
        out = [f"model: {self.model}", f"status: {'pass' if self.ok else 'fail'}",
               f"first_nonempty_degree: {self.first_nonempty}",
               f"zero_degrees: {self.zero_degrees}",
               f"closure_samples: {self.closure_samples}"]
        for f in self.failures:
            wit = ", ".join(f"{k}={v}" for k, v in f.witness.items())
            out.append(f"failure[{f.severity}] {f.check}: {f.message}" + (f" ({wit})" if wit else ""))
        out.extend(f"note: {n}" for n in self.notes)
        return out


def _random_element(basis: Basis, rng: random.Random):
    elems = basis.elements
    f = None
    while f is None or f.is_zero():
        f = sum((rng.choice((-3, -2, -1, 1, 2, 3)) * e for e in elems[1:]), elems[0] * rng.randint(1, 3))
    return f


def validate_model(model: GradedAlgebraModel, samples: int = 16, seed: int = 0,
                   max_degree: int | None = None) -> ValidationReport:
    """Check B_0 = constants, sampled multiplicative closure, and nonzero pieces.

    Never raises for mathematical failures; they are collected in the report.
    """
    report = ValidationReport(model.name)
    limit = min(model.truncation, 12 if max_degree is None else max_degree)
    b0 = model.graded_piece(0)
    one = RationalFunctionElement.constant(model.variables)
    if b0.dim != 1 or not contains(b0, one):
        report.failures.append(ValidationFailure("B0", f"B_0 has dimension {b0.dim}, expected the constants",
                                                 "error"))

    rng = random.Random(seed)
    for _ in range(samples):
        m1 = rng.randint(1, max(1, limit // 2))
        m2 = rng.randint(1, max(1, limit - m1))
        if m1 + m2 > model.truncation:
            continue
        p1, p2 = model.graded_piece(m1), model.graded_piece(m2)
        if not p1.dim or not p2.dim:
            continue
        report.closure_samples += 1
        f, g = _random_element(p1, rng), _random_element(p2, rng)
        if not contains(model.graded_piece(m1 + m2), f * g):
            report.failures.append(ValidationFailure(
                "closure", f"product of degree {m1} and {m2} elements is not in B_{m1 + m2}",
                witness={"m1": m1, "m2": m2, "f": f, "g": g}))
            break

    dims = {m: model.rank(m) for m in range(1, limit + 1)}
    nonzero = [m for m, d in dims.items() if d]
    report.first_nonempty = nonzero[0] if nonzero else None
    report.zero_degrees = [m for m, d in dims.items() if not d]
    late_zero = [m for m in report.zero_degrees if m > limit // 2]
    if late_zero:
        report.failures.append(ValidationFailure(
            "nonempty", f"B_m = 0 for m in {late_zero} within the tested range 1..{limit}",
            witness={"degrees": late_zero}))
    report.notes.append("'non-empty' graded pieces read as B_m != 0; every vector space is non-empty literally")
    return report


# -- instance constructors ------------------------------------------------------

def curve_section_ring(divisor: InfiniteDivisorSpec, name="curve", truncation=DEFAULT_TRUNCATION,
                       require_convergent=True, metadata=None) -> CurveSectionRing:
    return CurveSectionRing(divisor, name, truncation, metadata, require_convergent)


def dyadic_curve(ratio=Fraction(1, 2), points=(), truncation=DEFAULT_TRUNCATION, name="dyadic"):
    """D = sum_i ratio^i [p_i]; with the defaults a_i = 2^-i at p_i = i."""
    ratio = as_scalar(ratio)
    tail = GeometricTail(ratio, ratio, tuple(points or ()))
    return CurveSectionRing(InfiniteDivisorSpec((), tail), name, truncation,
                            {"birational_model": "projective line"})


def big_line_bundle_curve(degree=1, point=0, truncation=DEFAULT_TRUNCATION, name=None):
    """Complete section ring of O(degree) realised as L(m * degree * [point])."""
    divisor = InfiniteDivisorSpec(((point, as_scalar(degree)),))
    return CurveSectionRing(divisor, name or f"line_bundle_{degree}", truncation,
                            {"birational_model": "projective line"})


def polytope_monomial(vertices, variables=None, truncation=DEFAULT_TRUNCATION, name="polytope"):
    return LaurentMonomial(PolytopeSlice(vertices), variables, name, truncation,
                           {"birational_model": "torus"})


def unit_triangle(truncation=DEFAULT_TRUNCATION):
    return polytope_monomial([(0, 0), (1, 0), (0, 1)], ("x", "y"), truncation, "triangle")


def parity_monomial(truncation=DEFAULT_TRUNCATION, name="parity"):
    return LaurentMonomial(ParitySlice(), ("x",), name, truncation)


def generated(ambient, generators, name=None, truncation=None):
    return GeneratedSubalgebra(ambient, generators, name, truncation)


TAIL_FAMILIES = ("geometric", "harmonic-squares", "power", "harmonic")


def tail_family(name: str, parameters=(), points=(), truncation=DEFAULT_TRUNCATION,
                allow_divergent=False, name_override=None):
    """Curve instances whose divisor is a pure coefficient tail.

    geometric(scale, ratio); harmonic-squares(c) = power(c, 2);
    power(c, k); harmonic(c) = power(c, 1), which is not summable and is
    refused unless ``allow_divergent``.
    """
    params = [as_scalar(p) for p in parameters]
    if name == "geometric":
        tail = GeometricTail(*(params or [Fraction(1, 2), Fraction(1, 2)]), points=tuple(points))
    elif name == "harmonic-squares":
        c = params[0] if params else Fraction(607, 1000)
        tail = PowerTail(c, 2, tuple(points))
    elif name == "power":
        tail = PowerTail(params[0], int(params[1]), tuple(points))
    elif name == "harmonic":
        tail = PowerTail(params[0] if params else Fraction(1), 1, tuple(points))
    else:
        raise ModelError(f"unknown tail family {name!r}; expected one of {TAIL_FAMILIES}")
    label = f"{name}({', '.join(map(str, params))})" if params else name
    return CurveSectionRing(InfiniteDivisorSpec((), tail), name_override or label, truncation,
                            require_convergent=not allow_divergent)


def shipped_instances(truncation=DEFAULT_TRUNCATION) -> dict:
    """The instance library used by the acceptance checks and demos."""
    dyadic = dyadic_curve(truncation=truncation)
    line = big_line_bundle_curve(1, truncation=truncation, name="line")
    x = Poly.variable(CURVE_VARIABLES, "x")
    gen_line = generated(line, [(1, RationalFunctionElement.constant(CURVE_VARIABLES)),
                                (1, RationalFunctionElement(Poly.constant(CURVE_VARIABLES), {x: 1}))],
                         name="generated_line")
    gen_dyadic = generated(dyadic, [(d, f) for d in (1, 2, 4) for f in dyadic.graded_piece(d).elements],
                           name="generated_dyadic")
    return {
        "dyadic": dyadic,
        "line": line,
        "triangle": unit_triangle(truncation),
        "parity": parity_monomial(truncation),
        "generated_line": gen_line,
        "generated_dyadic": gen_dyadic,
        "harmonic_squares": tail_family("harmonic-squares", truncation=truncation, name_override="harmonic_squares"),
        "dyadic_even": Rescale(dyadic, 2, name="dyadic_even"),
    }


def require_valid(model, samples=16, seed=0) -> ValidationReport:
    report = validate_model(model, samples, seed)
    if report.fatal:
        raise ValidationError(f"model {model.name} failed validation", report)
    return report
