"""Seeded samplers shared by the property tests and the acceptance run."""
from __future__ import annotations

import random

from approxalg.kernel import INFINITY, echelonize
from approxalg.valuation import CoordinateFlag, CurvePoint

# (instance name, flag, degree range) used for random sampling
SAMPLING_PLAN = [
    ("dyadic", CurvePoint(-1), (1, 12)),
    ("dyadic", CurvePoint(INFINITY), (1, 12)),
    ("dyadic", CurvePoint(0), (1, 12)),
    ("line", CurvePoint(INFINITY), (1, 8)),
    ("line", CurvePoint(3), (1, 8)),
    ("harmonic_squares", CurvePoint(-2), (1, 12)),
    ("generated_dyadic", CurvePoint(-1), (1, 10)),
    ("triangle", CoordinateFlag((0, 1)), (1, 5)),
    ("triangle", CoordinateFlag((1, 0)), (1, 5)),
    ("triangle", CoordinateFlag((0, 1), (1, 2)), (1, 4)),
    ("triangle", CoordinateFlag((1, 0), (-1, 1)), (1, 4)),
    ("parity", CoordinateFlag((0,), (2,)), (1, 8)),
]


def random_combination(basis, rng, terms=None):
    elems = basis.elements
    k = terms or rng.randint(1, len(elems))
    chosen = rng.sample(range(len(elems)), min(k, len(elems)))
    f = None
    while f is None or f.is_zero():
        f = sum((rng.randint(-4, 4) * elems[i] for i in chosen[1:]), elems[chosen[0]] * rng.randint(1, 4))
    return f


def random_subspaces(instances, count, seed=0, max_dim=6):
    """Yield (model name, flag, V, requested generator count) for seeded random subspaces."""
    rng = random.Random(seed)
    for i in range(count):
        name, flag, (lo, hi) = SAMPLING_PLAN[i % len(SAMPLING_PLAN)]
        model = instances[name]
        m = rng.randint(lo, hi)
        piece = model.graded_piece(m)
        k = rng.randint(1, max_dim)
        gens = [random_combination(piece, rng) for _ in range(k)]
        yield name, flag, echelonize(gens, model.variables), k


def random_pairs(instances, count, seed=0):
    """Yield (model name, flag, f, g) with f, g nonzero elements of random pieces."""
    rng = random.Random(seed)
    for i in range(count):
        name, flag, (lo, hi) = SAMPLING_PLAN[i % len(SAMPLING_PLAN)]
        model = instances[name]
        f = random_combination(model.graded_piece(rng.randint(lo, hi)), rng)
        g = random_combination(model.graded_piece(rng.randint(lo, hi)), rng)
        yield name, flag, f, g
