"""D = sum_i c/i^2 [i] with c = 607/1000: a summable tail with slowly decaying coefficients.

The number of coefficients >= 1/l grows like sqrt(c l), and the truncated
power-image ratio table cannot settle the verdict at desk scale.
"""
from approxalg import shipped_instances
from approxalg.diagnostics import approximability_verdict
from approxalg.divisor import coefficient_decay, divisor_limit_estimate

model = shipped_instances()["harmonic_squares"]

est = divisor_limit_estimate(model, 32)
decay = coefficient_decay(est, model, levels=40)
print(" l  estimate  D")
for l in (1, 2, 5, 10, 20, 40):
    print(f"{l:2d}  {decay.counts[l]:8d}  {decay.analytic_counts[l]}")

v = approximability_verdict(model, N=16)
print()
print("\n".join(v.lines()))
