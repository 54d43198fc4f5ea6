"""Exact diagnostics for graded algebras: valuations, Okounkov bodies,
approximability tables and the divisors D_m."""
from .algebra import (
    CurveSectionRing,
    GeneratedSubalgebra,
    GeometricTail,
    GradedAlgebraModel,
    InfiniteDivisorSpec,
    LaurentMonomial,
    PowerTail,
    Rescale,
    big_line_bundle_curve,
    dyadic_curve,
    generated,
    graded_piece,
    parity_monomial,
    polytope_monomial,
    power_chain,
    power_image,
    shipped_instances,
    subalgebra_rescale,
    tail_family,
    unit_triangle,
    validate_model,
)
from .diagnostics import (
    approximability_verdict,
    condition3_table,
    default_schedule,
    growth_proxies,
    liminf_estimate,
    rank_ratio_check,
)
from .divisor import (
    FiniteDivisor,
    PrimeDivisor,
    check_inclusion,
    check_monotonicity,
    coefficient_decay,
    compute_Dm,
    divisor_limit_estimate,
    pole_divisor,
)
from .instance_file import load_instance, parse_instance
from .kernel import INFINITY, Basis, Poly, RationalFunctionElement, echelonize, product_space
from .okounkov import body_approx, check_volume_identity, collect_semigroup, volume_sequence
from .polytope import Polytope, body_volume, convex_hull
from .valuation import CoordinateFlag, CurvePoint, multivaluation, valuation_image

__version__ = "0.1.0"
