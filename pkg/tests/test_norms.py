from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discrepancy_lab import haar, norms
from discrepancy_lab.discrepancy import exact_mean
from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.errors import BudgetError, DomainError
from discrepancy_lab.pointset import PointSet, generate_vdc

HALF = Dyadic(1, 1)


def corner_scan(ps: PointSet) -> Fraction:
    """``sup |D|`` from one-sided limits at every pair of breakpoints."""
    xs = sorted({p.x.as_fraction() for p in ps.points} | {Fraction(0), Fraction(1)})
    ys = sorted({p.y.as_fraction() for p in ps.points} | {Fraction(0), Fraction(1)})
    best = Fraction(0)
    for x in xs:
        for y in ys:
            # limit from above-right counts points on the lines, the value at the corner does not
            closed = sum(1 for p in ps.points if p.x.as_fraction() <= x and p.y.as_fraction() <= y)
            open_ = sum(1 for p in ps.points if p.x.as_fraction() < x and p.y.as_fraction() < y)
            area = ps.N * x * y
            best = max(best, abs(closed - area), abs(open_ - area))
    return best


def test_linf_examples():
    assert norms.linf_norm(generate_vdc(1, "0")) == Fraction(7, 8)
    assert norms.linf_norm(PointSet.from_points([])) == 0
    assert norms.linf_norm(PointSet.from_points([(HALF, HALF)])) == Fraction(3, 4)


@pytest.mark.parametrize("n,sigma", [(2, "00"), (3, "010"), (4, "1101"), (5, "00000")])
def test_linf_matches_corner_scan(n, sigma):
    ps = generate_vdc(n, sigma)
    assert norms.linf_norm(ps) == corner_scan(ps)


def test_linf_sampled_is_a_lower_bound():
    ps = generate_vdc(6, "011010")
    assert norms.linf_sampled(ps, 2000, seed=1) <= norms.linf_norm(ps)


def test_linf_budget():
    with pytest.raises(BudgetError):
        norms.linf_norm(generate_vdc(8, "00000000"), budget=100)


def test_l2_of_v2():
    ps = generate_vdc(2, "00")
    power = norms.lp_power_exact(ps, 2)
    assert power == Fraction(911, 4608)
    assert power > exact_mean(ps) ** 2


@pytest.mark.parametrize("n", range(1, 13))
def test_l2_at_least_the_mean(n):
    assert norms.lp_power_exact(generate_vdc(n, DigitString.zeros(n)), 2) >= Fraction(n * n, 64)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_methods_agree(n):
    ps = generate_vdc(n, DigitString.balanced(n))
    for p in (2, 4, 6):
        exact = norms.lp_norm(ps, p, "exact").value
        assert norms.lp_norm(ps, p, "gauss").value == pytest.approx(exact, rel=1e-10)
        quad = norms.lp_norm(ps, p, "quadrature")
        assert abs(quad.value - exact) <= max(quad.error, 1e-12)


def test_exact_needs_even_p():
    with pytest.raises(DomainError):
        norms.lp_norm(generate_vdc(3, "000"), 3, "exact")
    with pytest.raises(DomainError):
        norms.lp_norm(generate_vdc(3, "000"), 0.5)


def test_monotone_in_p_and_below_linf():
    for n in (3, 5, 7):
        ps = generate_vdc(n, DigitString.random(n, 2))
        vals = [norms.lp_norm(ps, p).value for p in (1, 2, 3, 4, 8, 16, 32)]
        assert all(a <= b * (1 + 1e-6) for a, b in zip(vals, vals[1:]))
        assert vals[-1] <= float(norms.linf_norm(ps)) * (1 + 1e-9)


def test_orlicz_closed_forms():
    spec = norms.OrliczSpec(1.0)
    v = norms.orlicz_norm([1.0], [1.0], spec)
    assert v.value == pytest.approx(1 / math.log(2), rel=1e-9)
    assert v.lower <= 1 / math.log(2) <= v.upper
    for g in (1, 5, 10, 20):
        v = norms.orlicz_norm([2.0 ** g], [2.0 ** -g], spec)
        assert v.value == pytest.approx(2.0 ** g / math.log1p(2.0 ** g), rel=1e-9)
    assert norms.orlicz_norm([0.0], [1.0], spec).value == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 8.0), st.floats(0.01, 100.0))
def test_orlicz_norm_is_homogeneous(alpha, c):
    spec = norms.OrliczSpec(alpha)
    f = np.array([0.3, 1.0, 2.5])
    w = np.array([0.2, 0.5, 0.3])
    a = norms.orlicz_norm(f, w, spec).value
    b = norms.orlicz_norm(c * f, w, spec).value
    assert b == pytest.approx(c * a, rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.2, 0.95))
def test_small_alpha_is_convexified(alpha):
    spec = norms.OrliczSpec(alpha)
    x = np.linspace(0, 4 * spec.threshold + 1, 400)
    y = spec(x)
    assert np.all(np.diff(y, 2) >= -1e-9)
    # tangent from the origin meets the function at the threshold
    xa = spec.threshold
    assert float(spec(np.array([xa]))[0]) == pytest.approx(math.expm1(xa ** alpha), rel=1e-9)


def test_llog_family():
    spec = norms.OrliczSpec(2.0, "llog")
    assert float(spec(np.array([1.0]))[0]) == pytest.approx(math.log(4.0) ** 0.5)
    for g in range(1, 21):
        ratio = norms.indicator_llog_norm(g, 2.0).value / norms.indicator_reference(g, 2.0)
        assert 0.25 <= ratio <= 4
    with pytest.raises(DomainError):
        norms.OrliczSpec(1.0, "weird")


def test_proxy_of_constant():
    lp = {p: 1.0 for p in norms.DEFAULT_PGRID}
    for alpha in (1.0, 2.0, 4.0):
        assert norms.proxy_from_lp(lp, alpha) == (2 ** (-1 / alpha), 2)


def test_proxy_grows_with_grid():
    ps = generate_vdc(5, DigitString.balanced(5))
    small = norms.exp_proxy(ps, 2.0, (2, 4))
    assert norms.exp_proxy(ps, 2.0, (2, 4, 8, 16)) >= small


def test_orlicz_norm_of_discrepancy_close_to_proxy():
    ps = generate_vdc(4, DigitString.balanced(4))
    v = norms.orlicz_norm_discrepancy(ps, norms.OrliczSpec(2.0))
    proxy = norms.exp_proxy(ps, 2.0)
    assert v.lower <= v.value <= v.upper
    assert 0.25 <= v.value / proxy <= 4


def test_square_function_examples():
    single = norms.HaarExpansion.single(2, 1, 1, 0)
    assert norms.sup_square_function(single) == 1
    assert norms.square_function(single, (0.3, 0.2)) == 1
    assert norms.square_function(single, (0.6, 0.2)) == 0
    rng = np.random.default_rng(0)
    fs = [haar.random_r_function(r, rng) for r in haar.hyperbolic_vectors(4)]
    assert norms.sup_square_function(norms.HaarExpansion.from_rfunctions(fs[:1])) == 1
    sq = norms.HaarExpansion.from_rfunctions(fs[:3]).square_function_squared()
    assert np.all(sq == 3)


def test_cww_ratios():
    k, l = 2, 3
    rep = norms.cww_check(norms.HaarExpansion.single(k, 0, l, 0), (2,))
    assert rep.ratios[2] == pytest.approx(2.0 ** (-(k + l) / 2) / math.sqrt(2))
    rng = np.random.default_rng(11)
    m = 10
    for _ in range(100):
        e = norms.HaarExpansion()
        for k in rng.choice(np.arange(3, 8), size=int(rng.integers(1, 4)), replace=False).tolist():
            e.add((k, m - k), rng.choice([-1, 1], size=(1 << k, 1 << (m - k))).astype(np.int64))
        assert norms.cww_check(e).max_ratio <= 4


def test_interpolation_examples():
    rep = norms.interpolation_check(2 ** -0.5, 1.0, 2.0, proxy=2 ** -0.5, A=1.0)
    assert rep.bound == 1 and rep.precondition_ok and rep.ratio <= 1
    assert rep.interpolated == pytest.approx(2 ** -0.5)
    for alpha in (3.0, 4.0):
        r = norms.interpolation_check(0.5, 1.0, alpha, A=1.0)
        assert r.interpolated <= r.bound


def test_norm_report_falls_back_when_over_budget():
    rep = norms.norm_report(generate_vdc(6, "000000"), budget=10)
    assert rep.linf_tag.startswith("lower bound")
    assert not rep.lp


def test_norm_report_json():
    rep = norms.norm_report(generate_vdc(3, "010"), pgrid=(2, 4), alphas=(2.0,))
    d = rep.as_dict()
    assert d["N"] == 8 and set(d["lp"]) == {"2", "4"}
    assert rep.to_json().startswith("{")

