"""Haar coefficients of D: every one is at most a constant over N, and they cancel in quadruples."""

from __future__ import annotations

from discrepancy_lab import haar
from discrepancy_lab.dyadic import DigitString
from discrepancy_lab.pointset import DyadicRectangle, generate_vdc

ps = generate_vdc(2, "00")
rec = haar.haar_coeff(ps, DyadicRectangle.of(1, 0, 1, 0))
# the counting part and the linear part cancel exactly here
print("V_2, R=[0,1/2)^2:", rec.counting, "-", rec.linear, "=", rec.total)

print("\n n   N * max |<D, h_R>|  over |R| >= 2^-2n")
for n in range(2, 10):
    ps = generate_vdc(n, DigitString.balanced(n))
    print(f"{n:2d}   {haar.max_scaled_coefficient(ps, haar.shapes_up_to(2 * n))}")

# Quadruples of points in large rectangles: residual * N^2 |R| never exceeds 1
ps = generate_vdc(8, DigitString.balanced(8))
worst = max(haar.quadruple_worst_ratio(ps, k, l)[0]
            for m in range(7) for k, l in haar.shapes_with_volume(m))
print("\nworst quadruple residual, scaled:", worst)

# Energy by level: the squared coefficients add up to the L2 norm
sums = haar.parseval_partial_sums(generate_vdc(5, "01010"), range(0, 14, 2))
print("Parseval partial sums:", [round(float(s), 5) for s in sums])
