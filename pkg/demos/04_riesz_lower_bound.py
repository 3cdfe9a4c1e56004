"""A lower bound for the exp(L^alpha) norm from a Riesz product of r-functions."""

from __future__ import annotations

from discrepancy_lab import riesz
from discrepancy_lab.dyadic import DigitString
from discrepancy_lab.pointset import generate_vdc

ps = generate_vdc(8, DigitString.balanced(8))
run = riesz.riesz_run(ps, a=3)
print("index m =", run.m, " G =", run.G)
print("Psi takes values", run.structure.values, "and has integral", run.structure.integral)
print("pairing by order:", [float(v) for v in run.orders])

for alpha in (2.0, 4.0, 8.0):
    cert = run.certificate(alpha)
    lo, hi = cert.lower_bracket
    print(f"alpha={alpha:g}: ||D|| >= {cert.lower_bound:.5f}  (bracket {lo:.5f} .. {hi:.5f})")

# Which spacings let the first-order term carry the pairing
for row in riesz.sweep_spacing(generate_vdc(7, DigitString.balanced(7))):
    print(row)
