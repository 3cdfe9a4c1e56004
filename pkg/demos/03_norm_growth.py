"""How the size of D grows with n: sup norm ~ n, L2 ~ sqrt(n), exp(L^2) ~ sqrt(n)."""

from __future__ import annotations

import math

from discrepancy_lab import bmo, norms
from discrepancy_lab.dyadic import DigitString
from discrepancy_lab.pointset import generate_vdc

print(" n   linf/n   l2/sqrt(n)  exp2/sqrt(n)  bmo/sqrt(n)")
for n in range(4, 11):
    ps = generate_vdc(n, DigitString.balanced(n))
    linf = float(norms.linf_norm(ps))
    l2 = norms.lp_norm(ps, 2).value
    proxy = norms.exp_proxy(ps, 2.0)
    glob = math.sqrt(bmo.global_square_sum(ps, 2 * n))
    r = math.sqrt(n)
    print(f"{n:2d}  {linf / n:.4f}   {l2 / r:.4f}      {proxy / r:.4f}        {glob / r:.4f}")

# Without scrambling the mean alone is n/8, so the L2 norm is at least that
for n in (6, 9, 12):
    ps = generate_vdc(n, DigitString.zeros(n))
    print(f"zeros n={n}: l2 = {norms.lp_norm(ps, 2).value:.4f} >= n/8 = {n / 8}")

# The Orlicz norm itself, next to the sup_p p^(-1/2) ||D||_p proxy
ps = generate_vdc(6, DigitString.balanced(6))
v = norms.orlicz_norm_discrepancy(ps, norms.OrliczSpec(2.0))
print(f"\nexp(L^2) norm at n=6: {v.value:.4f} in [{v.lower:.4f}, {v.upper:.4f}],"
      f" proxy {norms.exp_proxy(ps, 2.0):.4f}")
