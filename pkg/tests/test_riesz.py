from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from discrepancy_lab import riesz
from discrepancy_lab.discrepancy import box_integral
from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.errors import BudgetError, DomainError
from discrepancy_lab.pointset import generate_vdc


def test_select_G():
    assert riesz.select_G(5, 1) == [(r, 5 - r) for r in range(6)]
    assert riesz.select_G(5, 5) == [(0, 5), (5, 0)]
    assert riesz.select_G(5, 6) == [(0, 5)]
    with pytest.raises(DomainError):
        riesz.select_G(5, 0)


def test_riesz_index():
    for N in (1, 2, 3, 16, 100):
        m = riesz.riesz_index(N)
        assert 2 * N < 2 ** m <= 4 * N


def test_empty_product():
    ps = generate_vdc(3, "010")
    grid = riesz.build_riesz(ps, [])
    rep = riesz.structure(grid)
    assert rep.values == (1,) and rep.ok
    assert riesz.order_pairings(ps, grid) == []


def test_single_factor():
    ps = generate_vdc(4, "0110")
    grid = riesz.build_riesz(ps, [(2, 4)])
    rep = riesz.structure(grid)
    assert rep.values == (0, 2) and rep.top_measure == Fraction(1, 2) and rep.integral == 1


@pytest.mark.parametrize("n", range(3, 9))
def test_structure(n):
    ps = generate_vdc(n, DigitString.balanced(n))
    m = riesz.riesz_index(ps.N)
    assert riesz.structure(riesz.build_riesz(ps, riesz.select_G(m, 3))).ok


def test_pair_matches_box_integrals():
    ps = generate_vdc(3, "011")
    rng = np.random.default_rng(4)
    mx, my = 4, 5
    w = rng.integers(-3, 4, size=(1 << mx, 1 << my))
    oracle = sum(int(w[i, j]) * box_integral(ps, Dyadic(i, mx), Dyadic(i + 1, mx),
                                             Dyadic(j, my), Dyadic(j + 1, my))
                 for i in range(1 << mx) for j in range(1 << my))
    assert riesz.pair_dense(ps, w) == oracle
    # slab height does not change the result
    assert riesz.pair(ps, mx, my, lambda y0, y1: w[:, y0:y1], height=3) == oracle


def test_orders_add_up_and_match_terms():
    for n in (4, 5, 6):
        ps = generate_vdc(n, DigitString.balanced(n))
        run = riesz.riesz_run(ps, a=2)
        assert run.orders[0] == run.first_order
        terms = riesz.term_pairings(ps, run.grid.fs)
        assert sum((t[2] for t in terms), Fraction(0)) == sum(run.orders[1:], Fraction(0))
        psi = np.ones((1 << run.grid.mx, 1 << run.grid.my), dtype=np.int64)
        for v in run.grid.factors(0, 1 << run.grid.my):
            psi *= 1 + v
        assert riesz.pair_dense(ps, psi - 1) == run.pairing


def test_certificate():
    ps = generate_vdc(8, DigitString.balanced(8))
    run = riesz.riesz_run(ps, a=3)
    for alpha in (2.0, 4.0, 8.0):
        cert = run.certificate(alpha)
        lo, hi = cert.lower_bracket
        assert 0 < lo <= cert.lower_bound <= hi
        assert cert.as_dict()["g"] == len(run.G)
    with pytest.raises(DomainError):
        run.certificate(1.5)


def test_grid_budget():
    ps = generate_vdc(6, "000000")
    with pytest.raises(BudgetError):
        riesz.build_riesz(ps, riesz.select_G(8, 3), budget=1000)


def test_spacing_sweep_rows():
    rows = riesz.sweep_spacing(generate_vdc(5, DigitString.balanced(5)), (1, 3))
    assert [r["a"] for r in rows] == [1, 3]
    for r in rows:
        assert r["pairing"] == pytest.approx(r["first_order"] + r["higher_orders"])
