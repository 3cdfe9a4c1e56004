from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discrepancy_lab import haar
from discrepancy_lab.discrepancy import box_integral, exact_mean
from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.errors import BudgetError, HypothesisError, RangeError, ShapeError
from discrepancy_lab.norms import lp_power_exact
from discrepancy_lab.pointset import DyadicRectangle, UNIT_SQUARE, generate_vdc


def oracle_coeff(ps, R: DyadicRectangle, t=(0, 0)) -> Fraction:
    """``<D, h_R^t>`` from box integrals of ``D`` over the halves of ``R``."""
    def halves(iv, eps):
        a, b = iv.left, iv.right
        if eps:
            return [(a, b, 1)]
        mid = a + Dyadic(1, iv.level + 1)
        return [(a, mid, -1), (mid, b, 1)]

    return sum((sx * sy * box_integral(ps, a, b, c, d)
                for a, b, sx in halves(R.rx, t[0]) for c, d, sy in halves(R.ry, t[1])), Fraction(0))


def all_rectangles(max_volume: int):
    for k, l in haar.shapes_up_to(max_volume):
        for i in range(1 << k):
            for j in range(1 << l):
                yield DyadicRectangle.of(k, i, l, j)


def test_haar_eval_examples():
    q = Dyadic(1, 2)
    assert haar.haar_eval(UNIT_SQUARE, (0, 0), (q, q)) == 1
    assert haar.haar_eval(UNIT_SQUARE, (0, 0), (q, Dyadic(3, 2))) == -1
    R = DyadicRectangle.of(1, 1, 1, 1)
    for t in haar.TYPES:
        assert haar.haar_eval(R, t, (q, q)) == 0


def test_v2_coefficient_example():
    rec = haar.haar_coeff(generate_vdc(2, "00"), DyadicRectangle.of(1, 0, 1, 0))
    assert rec.linear == Fraction(1, 64) and rec.counting == Fraction(1, 64) and rec.total == 0


@pytest.mark.parametrize("n,sigma", [(2, "00"), (3, "101"), (4, "0110")])
def test_coefficients_match_box_oracle(n, sigma):
    ps = generate_vdc(n, sigma)
    for R in all_rectangles(n + 1):
        assert haar.haar_coeff(ps, R).total == oracle_coeff(ps, R)
    for level in range(n + 2):
        for i in range(1 << level):
            Rx = DyadicRectangle.of(level, i, 0, 0)
            Ry = DyadicRectangle.of(0, 0, level, i)
            assert haar.haar_coeff(ps, Rx, (0, 1)).total == oracle_coeff(ps, Rx, (0, 1))
            assert haar.haar_coeff(ps, Ry, (1, 0)).total == oracle_coeff(ps, Ry, (1, 0))
    assert haar.haar_coeff(ps, UNIT_SQUARE, (1, 1)).total == exact_mean(ps)


def test_wrong_rectangle_for_type():
    with pytest.raises(ShapeError):
        haar.haar_coeff(generate_vdc(2, "00"), DyadicRectangle.of(1, 0, 1, 0), (1, 1))


def test_empty_rectangles_share_one_value():
    ps = generate_vdc(3, "011")
    for k, l in [(2, 2), (3, 1), (1, 3), (3, 3)]:
        c = haar.shape_coeffs(ps, k, l)
        area = Fraction(1, 1 << (k + l))
        for key, R in enumerate(DyadicRectangle.of(k, i, l, j) for i in range(1 << k) for j in range(1 << l)):
            if not any(R.contains(p) for p in ps.points):
                assert c.total(key) == -ps.N * area * area / 16


def test_balanced_mean_coefficient_vanishes():
    for n in (2, 4, 6):
        assert haar.haar_coeff(generate_vdc(n, DigitString.balanced(n)), UNIT_SQUARE, (1, 1)).total == 0


@pytest.mark.parametrize("n", range(4, 9))
def test_scaled_coefficient_maximum(n):
    ps = generate_vdc(n, DigitString.balanced(n))
    assert haar.max_scaled_coefficient(ps, haar.shapes_up_to(2 * n)) == Fraction(1, 4)


def test_scan_exhaustive_matches_dense():
    ps = generate_vdc(4, "0101")
    agg = haar.scan_coeffs(ps, haar.shapes_up_to(8)).aggregate()
    assert agg.count == sum(1 << (k + l) for k, l in haar.shapes_up_to(8))
    assert agg.scaled_max == haar.max_scaled_coefficient(ps, haar.shapes_up_to(8))
    assert sum(agg.histogram.values()) == agg.count


def test_scan_empty_selector():
    agg = haar.scan_coeffs(generate_vdc(3, "000"), []).aggregate()
    assert agg.count == 0 and agg.max_abs == 0


def test_sampled_scan_is_deterministic():
    ps = generate_vdc(6, "010101")
    a = haar.scan_coeffs(ps, haar.shapes_up_to(12), "sampled", count=10**4, seed=7).aggregate()
    b = haar.scan_coeffs(ps, haar.shapes_up_to(12), "sampled", count=10**4, seed=7).aggregate()
    assert (a.count, a.max_abs, a.argmax, a.histogram) == (b.count, b.max_abs, b.argmax, b.histogram)


def test_scan_budget():
    with pytest.raises(BudgetError):
        haar.scan_coeffs(generate_vdc(8, "00000000"), haar.shapes_up_to(16), budget=1000)


def test_quadruple_examples():
    ps = generate_vdc(4, "0000")
    res = haar.quadruple_residual(ps, DyadicRectangle.of(1, 0, 1, 0))
    # N |R| / 4 quadruples
    assert len(res) == 1
    assert all(r <= Fraction(1, 16 * 16) * 4 for r in res)
    for n in (2, 4, 6):
        ps = generate_vdc(n, DigitString.random(n, 1))
        assert all(r <= Fraction(1, ps.N ** 2) for r in haar.quadruple_residual(ps, UNIT_SQUARE))


@pytest.mark.parametrize("n", range(2, 8))
def test_quadruple_counts_and_bound(n):
    ps = generate_vdc(n, DigitString.random(n, 3 * n))
    for m in range(n - 1):
        for k, l in haar.shapes_with_volume(m):
            ratio, count = haar.quadruple_worst_ratio(ps, k, l)
            assert count == (ps.N >> (k + l)) // 4 * (1 << (k + l))
            assert ratio <= 1
            R = DyadicRectangle.of(k, (1 << k) - 1, l, 0)
            assert len(haar.quadruple_residual(ps, R)) == (ps.N >> (k + l)) // 4


def test_quadruple_needs_large_rectangle():
    with pytest.raises(ShapeError):
        haar.quadruple_residual(generate_vdc(4, "0000"), DyadicRectangle.of(2, 0, 1, 0))


def test_r_function_pairing():
    ps = generate_vdc(2, "00")
    for r in haar.hyperbolic_vectors(4):
        f = haar.build_r_function(ps, r)
        c = haar.shape_coeffs(ps, *r)
        absolute = sum((abs(c.total(key)) for key in range(c.size)), Fraction(0))
        assert haar.r_inner(ps, f) == absolute
        assert haar.r_inner(ps, f) > 0
        assert haar.r_inner(ps, f.negated()) == -haar.r_inner(ps, f)


def test_r_function_values_cover_shape():
    rng = np.random.default_rng(0)
    f = haar.random_r_function((2, 3), rng)
    v = f.values()
    assert v.shape == (8, 16) and set(np.unique(v).tolist()) == {-1, 1}
    assert haar.rfunction_shape(v) == (2, 3)
    with pytest.raises(ShapeError):
        haar.RFunction((1, 1), np.zeros((2, 2)))


def test_product_rule_index():
    rng = np.random.default_rng(1)
    n = 5
    fs = [haar.random_r_function(r, rng) for r in haar.hyperbolic_vectors(n)]
    assert haar.product_r([fs[2]]) is fs[2]
    for f, g in itertools.combinations(fs, 2):
        p = haar.product_r([f, g])
        assert p.index == n + abs(f.r[0] - g.r[0])
        mx, my = p.r[0] + 1, p.r[1] + 1
        assert np.array_equal(p.values(), f.values(mx, my) * g.values(mx, my))
    with pytest.raises(HypothesisError):
        haar.product_r([fs[0], fs[0]])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_products_of_r_functions_are_r_functions(n, seed, v):
    rng = np.random.default_rng(seed)
    H = haar.hyperbolic_vectors(n)
    pick = sorted(rng.choice(len(H), size=min(v, len(H)), replace=False).tolist())
    fs = [haar.random_r_function(H[i], rng) for i in pick]
    p = haar.product_r(fs)
    mx, my = p.r[0] + 1, p.r[1] + 1
    prod = np.prod([f.values(mx, my).astype(np.int64) for f in fs], axis=0)
    assert np.array_equal(prod, p.values(mx, my))
    assert p.r == haar.product_shape([f.r for f in fs])


def test_count_products_examples():
    for n in (3, 5, 6):
        for s1 in range(1, n + 1):
            s2 = n + 1 - s1
            if s2 <= n:
                assert haar.count_products(n, (s1, s2), 2) == 1
    assert haar.count_products(6, (4, 5), 2) == 1
    assert haar.count_products(6, (4, 4), 3) == 1
    with pytest.raises(RangeError):
        haar.count_products(6, (3, 3), 2)


@pytest.mark.parametrize("n", range(2, 8))
def test_count_products_formula(n):
    for v in range(2, min(4, n) + 1):
        for s1, s2 in itertools.product(range(n + 1), repeat=2):
            if s1 + s2 >= n + v - 1:
                assert haar.count_products(n, (s1, s2), v) == haar.count_products_formula(n, (s1, s2), v)


def test_haar_values_matches_pointwise():
    R = DyadicRectangle.of(1, 1, 2, 2)
    grid = haar.haar_values(R, 3, 3)
    for a, b in itertools.product(range(8), repeat=2):
        x = (Dyadic(2 * a + 1, 4), Dyadic(2 * b + 1, 4))
        assert grid[a, b] == haar.haar_eval(R, (0, 0), x)


def test_parseval_partial_sums_increase_to_l2():
    ps = generate_vdc(3, "010")
    sums = haar.parseval_partial_sums(ps, range(0, 12))
    total = lp_power_exact(ps, 2)
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    assert sums[-1] <= total
    assert float(total - sums[-1]) < 1e-3 * float(total)
