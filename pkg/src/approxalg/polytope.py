"""Exact convex hulls and volumes of rational point sets in dimension <= 3."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, factorial, floor, gcd, lcm

from .errors import UnsupportedDimensionError
from .kernel import as_scalar


def _pt(p):
    return tuple(as_scalar(c) if not isinstance(c, Fraction) else c for c in p)


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _affine_frame(points):
    """Affine rank of the points and coordinate indices that stay injective on their span."""
    p0 = points[0]
    rows = [list(_sub(p, p0)) for p in points[1:]]
    pivots = []
    r = 0
    ncols = len(p0)
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return r, pivots


def _hull2(points):
    # Andrew's monotone chain; collinear points dropped
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # counter-clockwise


def _shoelace(poly):
    s = 0
    for i in range(len(poly)):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % len(poly)]
        s += x0 * y1 - x1 * y0
    return abs(Fraction(s)) / 2


def _plane_key(n, off):
    g = gcd(*n)
    return tuple(x // g for x in n), off // g


def _facet(points, n, off):
    """Polygon (in order) of the points on the supporting plane n.x = off."""
    on = [q for q in points if _dot(n, q) == off]
    drop = max(range(3), key=lambda i: abs(n[i]))
    keep = [i for i in range(3) if i != drop]
    proj = {tuple(q[i] for i in keep): q for q in on}
    return [proj[v] for v in _hull2(list(proj))]


def _supporting(points, a, b, exclude=None):
    """A supporting plane through the segment ab, found by pivoting around it.

    Returns (normal, offset) with every point on the side normal.x <= offset,
    skipping planes equal to ``exclude``.
    """
    e = _sub(b, a)
    cands = [q for q in points if _cross(e, _sub(q, a)) != (0, 0, 0)]
    if exclude is not None:
        cands = [q for q in cands if _dot(exclude[0], q) != exclude[1]]
    for sign in (1, -1):
        c = cands[0]
        for q in cands[1:]:
            if sign * _dot(_cross(e, _sub(c, a)), _sub(q, a)) > 0:
                c = q
        n = _cross(e, _sub(c, a))
        sides = [_dot(n, _sub(q, a)) for q in points]
        if all(x <= 0 for x in sides) or all(x >= 0 for x in sides):
            if any(x > 0 for x in sides):
                n = tuple(-x for x in n)
            return _plane_key(n, _dot(n, a))
    raise AssertionError("no supporting plane through a hull edge")


def _first_edge(points):
    # the lexicographically least point is a vertex; wrap once in the xy
    # projection to reach a supporting plane parallel to the z axis
    a = points[0]
    others = [q for q in points if (q[0], q[1]) != (a[0], a[1])]
    if not others:
        return a, points[-1]
    b = others[0]
    for q in others[1:]:
        t = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
        if t < 0 or (t == 0 and _dot(_sub(q, a)[:2], _sub(q, a)[:2]) > _dot(_sub(b, a)[:2], _sub(b, a)[:2])):
            b = q
    n = (b[1] - a[1], a[0] - b[0], 0)
    off = _dot(n, a)
    if any(_dot(n, q) > off for q in points):
        n, off = tuple(-x for x in n), -off
    line = [q for q in points if _dot(n, q) == off]
    if _affine_frame(line)[0] == 2:
        poly = _facet(points, n, off)
        return poly[0], poly[1]
    line.sort()
    return line[0], line[-1]


def _facets3(points):
    """Supporting planes of a full-dimensional 3d point set, each with its polygon (in order).

    Gift wrapping: start from one facet and pivot around every polygon edge
    to reach the neighbouring facet. Coplanar points are merged into one
    polygon, so no degenerate triangles arise.
    """
    # wrap in integer coordinates: the common denominator is cleared once
    points = sorted(set(points))
    den = lcm(*(Fraction(c).denominator for q in points for c in q))
    back = {tuple(int(c * den) for c in q): q for q in points}
    ipts = sorted(back)
    a, b = _first_edge(ipts)
    planes = {}
    todo = [_supporting(ipts, a, b)]
    while todo:
        key = todo.pop()
        if key in planes:
            continue
        poly = _facet(ipts, *key)
        planes[key] = poly
        for u, v in zip(poly, poly[1:] + poly[:1]):
            nxt = _supporting(ipts, u, v, exclude=key)
            if nxt not in planes:
                todo.append(nxt)
    return {(tuple(Fraction(c) for c in n), Fraction(off, den)): [back[q] for q in poly]
            for (n, off), poly in planes.items()}


@dataclass(frozen=True)
class Polytope:
    dimension: int
    vertices: tuple

    @property
    def volume(self) -> Fraction:
        return body_volume(self)


def convex_hull(points, dimension: int | None = None) -> Polytope:
    pts = sorted({_pt(p) for p in points})
    if not pts:
        raise ValueError("convex hull of an empty set")
    d = len(pts[0]) if dimension is None else dimension
    if any(len(p) != d for p in pts):
        raise ValueError("points of mixed dimension")
    if d > 3:
        raise UnsupportedDimensionError(f"exact hulls only for d <= 3 (got {d})", points=pts)
    return Polytope(d, tuple(sorted(_extreme(pts))))


def _extreme(pts):
    d = len(pts[0])
    r, cols = _affine_frame(pts)
    if r == 0:
        return [pts[0]]
    if r < d:
        proj = {tuple(p[i] for i in cols): p for p in pts}
        return [proj[v] for v in _extreme(sorted(proj))]
    if d == 1:
        return [pts[0], pts[-1]]
    if d == 2:
        return _hull2(pts)
    verts = set()
    for poly in _facets3(pts).values():
        verts.update(poly)
    return sorted(verts)


def body_volume(p: Polytope) -> Fraction:
    """Exact d-dimensional Euclidean volume (zero for degenerate hulls)."""
    d = p.dimension
    if d > 3:
        raise UnsupportedDimensionError(f"exact volume only for d <= 3 (got {d})")
    pts = list(p.vertices)
    if _affine_frame(pts)[0] < d:
        return Fraction(0)
    if d == 1:
        return pts[-1][0] - pts[0][0]
    if d == 2:
        return _shoelace(_hull2(pts))
    c = tuple(sum(q[i] for q in pts) / len(pts) for i in range(3))
    vol = Fraction(0)
    for poly in _facets3(pts).values():
        a = _sub(poly[0], c)
        for b, e in zip(poly[1:], poly[2:]):
            vol += abs(_dot(a, _cross(_sub(b, c), _sub(e, c))))
    return vol / 6


def contains(p: Polytope, point) -> bool:
    point = _pt(point)
    if point in p.vertices:
        return True
    return convex_hull(list(p.vertices) + [point], p.dimension).vertices == p.vertices


def halfspaces(p: Polytope):
    """Inequalities normal . x <= offset of a full-dimensional polytope."""
    d = p.dimension
    pts = list(p.vertices)
    if _affine_frame(pts)[0] < d:
        raise ValueError("halfspace description needs a full-dimensional polytope")
    if d == 1:
        return [((Fraction(-1),), -pts[0][0]), ((Fraction(1),), pts[-1][0])]
    if d == 2:
        ring = _hull2(pts)
        out = []
        for i, a in enumerate(ring):
            b = ring[(i + 1) % len(ring)]
            n = (b[1] - a[1], a[0] - b[0])  # outward for a counter-clockwise ring
            out.append((n, _dot(n, a)))
        return out
    return [(n, off) for (n, off) in _facets3(pts)]


def lattice_points(p: Polytope, scale: int = 1) -> list:
    """Integer points of scale * p, in lexicographic order."""
    verts = [tuple(scale * c for c in v) for v in p.vertices]
    d = p.dimension
    lo = [ceil(min(v[i] for v in verts)) for i in range(d)]
    hi = [floor(max(v[i] for v in verts)) for i in range(d)]
    box = [range(lo[i], hi[i] + 1) for i in range(d)]
    from itertools import product

    if _affine_frame(verts)[0] == d:
        hs = []
        for n, off in halfspaces(p):
            # integer form of n.x <= scale*off
            off = scale * off
            den = lcm(*(Fraction(c).denominator for c in n), Fraction(off).denominator)
            hs.append((tuple(int(c * den) for c in n), floor(off * den)))
        return [q for q in product(*box) if all(sum(a * b for a, b in zip(n, q)) <= off for n, off in hs)]
    scaled = Polytope(d, tuple(sorted(verts)))
    return [q for q in product(*box) if contains(scaled, q)]


def simplex_volume(vertices) -> Fraction:
    """|det| / d! of a d-simplex given by d+1 vertices; used as an independent check."""
    vs = [_pt(v) for v in vertices]
    d = len(vs[0])
    m = [list(_sub(v, vs[0])) for v in vs[1:]]
    det = Fraction(1)
    for c in range(d):
        piv = next((i for i in range(c, d) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, d):
            f = m[i][c] / m[c][c]
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return abs(det) / factorial(d)
