"""Point counts that are not powers of two: stretch a truncated van der Corput set."""

from __future__ import annotations

import math

from discrepancy_lab import norms
from discrepancy_lab.discrepancy import general_n_delta, general_n_grid
from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.pointset import general_n_set

n, N = 6, 45
sigma = DigitString.balanced(n)
trunc = general_n_set(n, sigma, N)
grid = general_n_grid(n, sigma, N)
x = (Dyadic(5, 3), Dyadic(3, 2))
# the same value from the dyadic truncated set and from the stretched N-point set
print(general_n_delta(trunc, x), grid.evaluate(x))

for N in (33, 40, 50, 63, 100, 200, 300, 500):
    n = N.bit_length()
    g = general_n_grid(n, DigitString.balanced(n), N)
    print(f"N={N:4d}  linf/log2(N) = {float(norms.linf_norm(g)) / math.log2(N):.4f}")
