"""Inner approximations of Newton-Okounkov bodies and the volume identity.

For each model we collect valuation vectors of B_1..B_M along a flag, take
the hull of v/m and compare d! vol with d! dim B_M / M^d.
"""
from approxalg import shipped_instances
from approxalg.algebra import big_line_bundle_curve, polytope_monomial
from approxalg.kernel import INFINITY
from approxalg.okounkov import check_volume_identity
from approxalg.valuation import CoordinateFlag, CurvePoint

inst = shipped_instances()
cases = [
    ("line, flag at infinity", big_line_bundle_curve(1), CurvePoint(INFINITY), 32),
    ("unit triangle", inst["triangle"], CoordinateFlag((0, 1)), 40),
    ("dyadic curve, flag at -1", inst["dyadic"], CurvePoint(-1), 64),
    ("parity slice", inst["parity"], CoordinateFlag((0,)), 16),
    ("unit 3-simplex", polytope_monomial([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]), CoordinateFlag((0, 1, 2)), 8),
]

for label, model, flag, M in cases:
    rep = check_volume_identity(model, flag, M)
    verts = ", ".join("(" + ", ".join(map(str, v)) + ")" for v in rep.body.vertices)
    print(f"{label} (M = {M})")
    print(f"  body vertices: {verts}")
    print(f"  d! vol = {rep.normalized_body_volume}, v_M = {rep.v_M}, "
          f"difference = {rep.difference if rep.comparable else 'not compared'}")
    failed = [k for k, ok in rep.hypotheses.items() if ok is False or (k == 'group_index' and ok != 1)]
    if failed:
        print(f"  hypotheses failing at this truncation: {failed}")
