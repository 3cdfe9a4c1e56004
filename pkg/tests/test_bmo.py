from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from discrepancy_lab import bmo
from discrepancy_lab.dyadic import DigitString
from discrepancy_lab.errors import DomainError
from discrepancy_lab.haar import semi_coeffs
from discrepancy_lab.norms import HaarExpansion
from discrepancy_lab.pointset import generate_vdc


def mask(mu: int, k: int, i: int, l: int, j: int) -> np.ndarray:
    U = np.zeros((1 << mu, 1 << mu), dtype=bool)
    sx, sy = 1 << (mu - k), 1 << (mu - l)
    U[i * sx:(i + 1) * sx, j * sy:(j + 1) * sy] = True
    return U


def test_single_haar_function():
    f = HaarExpansion.single(2, 1, 1, 1)
    assert bmo.square_sum_over(f, mask(3, 2, 1, 1, 1), depth=6) == 1
    # the whole square dilutes it by |R|
    assert bmo.global_square_sum(f, 6) == Fraction(1, 8)


@pytest.mark.parametrize("sigma", ["000", "101"])
def test_global_sum_matches_tilde_oracle(sigma):
    ps = generate_vdc(3, sigma)
    assert bmo.global_square_sum(ps, 4) == bmo.tilde_global_square_sum(ps, 4)


def test_depth_monotone():
    ps = generate_vdc(5, DigitString.balanced(5))
    vals = [bmo.global_square_sum(ps, d) for d in range(0, 13, 2)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_square_sum_over_union_of_cells():
    ps = generate_vdc(4, "0110")
    U = mask(3, 1, 0, 1, 0) | mask(3, 1, 1, 1, 1)
    v = bmo.square_sum_over(ps, U, 8)
    assert v > 0
    with pytest.raises(DomainError):
        bmo.square_sum_over(ps, np.zeros((4, 4), dtype=bool), 8)


def test_estimate_families():
    ps = generate_vdc(5, DigitString.balanced(5))
    only_global = bmo.bmo_estimate(ps, ("global",), depth=10)
    assert only_global.estimate == only_global.global_sum == bmo.global_square_sum(ps, 10)
    squares = bmo.bmo_estimate(ps, ("global", "squares"), depth=10)
    full = bmo.bmo_estimate(ps, depth=10)
    assert only_global.estimate <= squares.estimate <= full.estimate
    d = full.as_dict(bitmap=True)
    assert len(d["bitmap"]) == 1 << full.mu
    with pytest.raises(DomainError):
        bmo.bmo_estimate(ps, ("hexagons",))


def test_lower_growth():
    vals = [float(bmo.global_square_sum(generate_vdc(n, DigitString.balanced(n)), 2 * n)) / n
            for n in range(4, 9)]
    assert min(vals) >= 0.5 * vals[0]


def test_bmo1_single_term():
    assert bmo.bmo1_norm({(3, 5): Fraction(1, 8)}, depth=5) == 1


def test_bmo1_of_point_sets():
    ps = generate_vdc(5, "01011")
    depths = range(2, 9)
    vals = [bmo.bmo1_norm(ps, d) for d in depths]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    # |<D, h^{0,1}_I>| <= C |I| bounds every level's contribution by C^2
    C = max(semi_coeffs(ps, k).max_abs() * (1 << k) for k in range(9))
    assert all(v <= C * C * (d + 1) for v, d in zip(vals, depths))
