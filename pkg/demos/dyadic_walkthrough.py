"""The dyadic curve ring B_m = L(floor(m D)), D = sum_i 2^-i [i], end to end.

Run with ``python3 demos/dyadic_walkthrough.py``.
"""
from fractions import Fraction

from approxalg import shipped_instances
from approxalg.diagnostics import approximability_verdict, condition3_table, rank_ratio_check
from approxalg.divisor import coefficient_decay, divisor_limit_estimate

model = shipped_instances()["dyadic"]

print("dim B_m for m = 1..16:", [model.rank(m) for m in range(1, 17)])
print("every piece is m - s_2(m) + 1, so the ranks grow linearly with dips at powers of two\n")

table = condition3_table(model, [4, 8, 16], 16)
for p in table.p_values:
    row = table.row(p)
    print(f"p={p:2d}  ratio at n=16: {row[-1].ratio}  ({float(row[-1].ratio):.4f})")
verdict = approximability_verdict(model, P=[4, 8, 16], N=16, table=table)
print("\n".join(verdict.lines()), "\n")

rr = rank_ratio_check(model, 1, 256, start=100, window=(100, 256))
print(f"rk B_128 / rk B_127 = {rr.value(127)}; largest |ratio - 1| on 100..256 is {rr.max_deviation}\n")

est = divisor_limit_estimate(model, 16)
for prime in est.primes:
    rec = est.records[prime]
    print(f"coefficient at {prime}: sup_m D_m/m = {rec.sup} (attained at m = {rec.argmax})")
decay = coefficient_decay(est, model)
print("coefficients >= 1/l, l = 1..10:", [decay.counts[l] for l in range(1, 11)])
print("same counts for D itself:       ", [decay.analytic_counts[l] for l in range(1, 11)])
assert est.sup_divisor()[min(est.primes)] == Fraction(1, 2)
