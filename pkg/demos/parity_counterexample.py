"""A monomial ring whose odd pieces are one-dimensional.

S_m = {0..m} for even m and {0} for odd m. For odd p the powers of B_p stay
one-dimensional while B_np keeps growing whenever np is even, so the
power-image ratios along those n fall to zero and no p0 works.
"""
from approxalg import shipped_instances
from approxalg.algebra import validate_model
from approxalg.diagnostics import approximability_verdict, condition3_table, rank_ratio_check

model = shipped_instances()["parity"]

print("dim B_m, m = 1..10:", [model.rank(m) for m in range(1, 11)])
report = validate_model(model)
print("validation:", "; ".join(line for line in report.lines() if line.startswith("failure")) or "pass")
print("(the odd pieces do not absorb products such as B_2 * B_1, which the report flags but does not refuse)\n")

table = condition3_table(model, [3, 4, 5], 8)
for p in table.p_values:
    print(f"p={p}:", " ".join(str(e.ratio) for e in table.row(p)))

v = approximability_verdict(model, N=16)
print()
print("\n".join(v.lines()))

rr = rank_ratio_check(model, 1, 64)
print(f"\nrank ratios: max |rk B_(n+1)/rk B_n - 1| = {rr.max_deviation} at n = {rr.argmax}")
