"""Okounkov semigroups, inner body approximations and the volume identity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd

from .errors import FlagError, UnsupportedDimensionError
from .polytope import Polytope, body_volume, convex_hull
from .valuation import valuation_image

NORMALIZATION_NOTE = (
    "volume sequence normalised as d! * dim B_m / m^d; the alternative dim B_m / (m^d / d) "
    "agrees for d <= 2 and differs by (d-1)! otherwise"
)


@dataclass(frozen=True)
class OkounkovSample:
    M: int
    flag: object
    dimension: int
    levels: dict = field(compare=False)  # m -> tuple of valuation vectors

    @property
    def points(self) -> list:
        return [(m, v) for m in sorted(self.levels) for v in self.levels[m]]

    def level(self, m: int) -> tuple:
        return self.levels.get(m, ())


def collect_semigroup(model, flag, M: int, check_flag: bool = True) -> OkounkovSample:
    """Levels 1..M of the valuation semigroup of the model along ``flag``."""
    if check_flag:
        conflicts = model.flag_conflicts(flag)
        if conflicts:
            raise FlagError("; ".join(conflicts))
    levels = {m: valuation_image(model.graded_piece(m), flag).vectors for m in range(1, M + 1)}
    return OkounkovSample(M, flag, model.dimension, levels)


def body_approx(sample: OkounkovSample) -> Polytope:
    """Convex hull of v/m over the sampled points: an inner approximation of the body."""
    pts = {tuple(Fraction(c, m) for c in v) for m, v in sample.points}
    if not pts:
        raise ValueError("empty Okounkov sample")
    if sample.dimension > 3:
        raise UnsupportedDimensionError("exact hulls only for d <= 3", points=sorted(pts))
    return convex_hull(pts, sample.dimension)


def volume_sequence(model, M: int, start: int = 1) -> list:
    """[(m, d! * rk B_m / m^d)] for start <= m <= M."""
    d = model.dimension
    fd = factorial(d)
    return [(m, Fraction(fd * model.rank(m), m ** d)) for m in range(start, M + 1)]


def tail_window(seq: list, window: int) -> dict:
    tail = [v for _, v in seq[-window:]]
    return {"window": len(tail), "min": min(tail), "max": max(tail), "last": tail[-1]}


def lattice_index(vectors) -> int | None:
    """Index in Z^n of the subgroup generated by integer vectors; None if not full rank."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return None
    n = len(rows[0])
    basis = []
    for col in range(n):
        # gather rows with a nonzero entry in col and run a gcd reduction on them
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            active = nxt
        if not active:
            return None
        basis.append(active[0])
        rows = [r for r in rest if any(r)]
    det = 1
    for i, r in enumerate(basis):
        det *= r[i]
    return abs(det)


@dataclass
class VolumeIdentityReport:
    model: str
    flag: str
    M: int
    dimension: int
    body: Polytope
    body_volume: Fraction
    normalized_body_volume: Fraction
    v_M: Fraction
    difference: Fraction | None
    tail: dict
    hypotheses: dict
    notes: list

    @property
    def comparable(self) -> bool:
        return self.difference is not None

    def lines(self) -> list:
        out = [f"model: {self.model}", f"flag: {self.flag}", f"M: {self.M}", f"dimension: {self.dimension}",
               f"body_vertices: {[tuple(map(str, v)) for v in self.body.vertices]}",
               f"body_volume: {self.body_volume}",
               f"normalized_body_volume: {self.normalized_body_volume}",
               f"v_M: {self.v_M}",
               f"difference: {self.difference if self.comparable else 'not compared'}",
               f"tail_window: {self.tail['window']} min={self.tail['min']} max={self.tail['max']}"]
        out.extend(f"hypothesis {k}: {v}" for k, v in self.hypotheses.items())
        out.extend(f"note: {n}" for n in self.notes)
        return out


def check_volume_identity(model, flag, M: int, window: int | None = None) -> VolumeIdentityReport:
    """Compare d! vol(Delta_M) with v_M, after checking the hypotheses at truncation.

    Hypotheses: valuations non-negative, the degree-0 level is {0}, the
    sampled semigroup generates Z^{d+1}, and the body is full-dimensional.
    If any fails the difference is withheld.
    """
    sample = collect_semigroup(model, flag, M)
    d = model.dimension
    body = body_approx(sample)
    vol = body_volume(body)
    seq = volume_sequence(model, M)
    v_M = seq[-1][1]
    level0 = valuation_image(model.graded_piece(0), flag).vectors
    pts = [(0,) + tuple(v) for v in level0] + [(m,) + tuple(v) for m, v in sample.points]
    hyp = {
        "nonnegative": all(c >= 0 for m, v in sample.points for c in v),
        "level0_is_origin": level0 == ((0,) * d,),
        "group_index": lattice_index(pts),
        "full_dimensional": vol > 0,
    }
    ok = hyp["nonnegative"] and hyp["level0_is_origin"] and hyp["group_index"] == 1 and hyp["full_dimensional"]
    norm = factorial(d) * vol
    notes = [NORMALIZATION_NOTE]
    if not ok:
        notes.append("hypotheses fail at this truncation; no comparison reported")
    return VolumeIdentityReport(
        model.name, str(flag), M, d, body, vol, norm, v_M,
        abs(norm - v_M) if ok else None,
        tail_window(seq, window or max(1, M // 4)), hyp, notes,
    )


def instance_box(model, flag):
    """Box containing every normalised valuation vector v/m, or None if unknown.

    Curve models: [-a_q, deg bound], where a_q is the coefficient of D at
    the flag point. Polytope slices: the bounding box of the polytope after
    moving the flag center to the origin and permuting coordinates.
    """
    from .algebra import CurveSectionRing, GeneratedSubalgebra, LaurentMonomial, ParitySlice, PolytopeSlice, Rescale
    from .valuation import CurvePoint

    while isinstance(model, (GeneratedSubalgebra, Rescale)):
        if isinstance(model, Rescale):
            box = instance_box(model.base, flag)
            return None if box is None else [(model.k * lo, model.k * hi) for lo, hi in box]
        model = model.ambient
    if isinstance(model, CurveSectionRing):
        deg = model.divisor.degree_bound()
        if deg is None:
            return None
        point = flag.point if isinstance(flag, CurvePoint) else flag.center[0]
        return [(-model.divisor.coefficient(point), deg)]
    if isinstance(model, LaurentMonomial):
        rule = model.slice_rule
        if isinstance(rule, ParitySlice):
            verts = [(Fraction(0),), (Fraction(1),)]
        elif isinstance(rule, PolytopeSlice):
            verts = rule.polytope.vertices
        else:
            return None
        if any(flag.center):
            # translated monomials: valuations lie between 0 and the exponents' range
            lo = [min(Fraction(0), min(v[i] for v in verts)) for i in range(model.dimension)]
        else:
            lo = [min(v[i] for v in verts) for i in range(model.dimension)]
        hi = [max(v[i] for v in verts) for i in range(model.dimension)]
        return [(lo[i], hi[i]) for i in flag.order]
    return None
