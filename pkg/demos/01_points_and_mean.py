"""Build a few scrambled van der Corput sets and look at their simplest invariants."""

from __future__ import annotations

from discrepancy_lab.discrepancy import closed_form_mean, eval_discrepancy, exact_mean
from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.pointset import generate_vdc, net_violations

# The 8 points of V_3 with no scrambling, as exact dyadic pairs
ps = generate_vdc(3, "000")
for p in ps.points:
    print(p.x, p.y)

# Every dyadic rectangle of area 1/8 holds exactly one point
print("net violations:", net_violations(ps, 3))

# D at a corner is an integer count minus N times the area
x = (Dyadic(1, 1), Dyadic(3, 2))
d = eval_discrepancy(ps, x)
print(f"D{tuple(map(str, x))} = {d.count} - 8 * 3/8 = {d.value}")

# The mean of D depends only on how many digits the shift flips
print("\n n  zeros  balanced  random(0)")
for n in range(2, 11):
    row = [exact_mean(generate_vdc(n, s)) for s in
           (DigitString.zeros(n), DigitString.balanced(n), DigitString.random(n, 0))]
    assert row[2] == closed_form_mean(n, DigitString.random(n, 0))
    print(f"{n:2d}  {str(row[0]):>5}  {str(row[1]):>8}  {str(row[2]):>9}")
