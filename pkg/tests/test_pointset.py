from __future__ import annotations

import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from discrepancy_lab.dyadic import DigitString, Dyadic
from discrepancy_lab.errors import DomainError, DuplicatePointError, ParseError
from discrepancy_lab.pointset import (DyadicRectangle, PointSet, UNIT_SQUARE, general_n_set,
                                      generate_vdc, load_points, net_violations,
                                      points_in_rectangle, rectangle_counts, save_points)


def as_set(ps: PointSet) -> set:
    return {(p.x.as_fraction(), p.y.as_fraction()) for p in ps.points}


def eighths(*pairs) -> set:
    return {(Fraction(a, 8), Fraction(b, 8)) for a, b in pairs}


def test_v2_zero_shift():
    assert as_set(generate_vdc(2, "00")) == eighths((1, 1), (3, 5), (5, 3), (7, 7))


def test_v2_shift_01():
    assert as_set(generate_vdc(2, "01")) == eighths((1, 5), (3, 1), (5, 7), (7, 3))


def test_coordinate_means_are_one_half():
    for n in range(1, 9):
        for sigma in ("zeros", "balanced"):
            s = DigitString.zeros(n) if sigma == "zeros" else DigitString.balanced(n)
            ps = generate_vdc(n, s)
            assert Fraction(int(ps.xs.sum()), ps.N << ps.scale) == Fraction(1, 2)
            assert Fraction(int(ps.ys.sum()), ps.N << ps.scale) == Fraction(1, 2)


def test_points_in_rectangle():
    ps = generate_vdc(2, "00")
    hits = points_in_rectangle(ps, DyadicRectangle.of(1, 0, 1, 0))
    assert [(p.x, p.y) for p in hits] == [(Dyadic(1, 3), Dyadic(1, 3))]
    assert len(points_in_rectangle(ps, UNIT_SQUARE)) == 4


@pytest.mark.parametrize("n", range(1, 9))
def test_net_property_exhaustive(n):
    for sigma in (DigitString.zeros(n), DigitString.balanced(n), DigitString.random(n, n)):
        assert net_violations(generate_vdc(n, sigma), n) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1),
                                                      st.integers(0, n))))
def test_net_property_any_shift(case):
    n, s, k = case
    counts = rectangle_counts(generate_vdc(n, DigitString.from_int(s, n)), k, n - k)
    assert np.all(counts == 1)


def test_general_n_set_sizes():
    assert general_n_set(2, "00", 3).N == 4
    assert general_n_set(2, "00", 3).same_points(generate_vdc(2, "00"))
    ps = general_n_set(3, "000", 5)
    assert ps.N == 6 and ps.kind == "vdc-truncated"
    with pytest.raises(DomainError):
        general_n_set(3, "000", 8)


def test_save_load_round_trip():
    ps = generate_vdc(4, "0101")
    buf = io.StringIO()
    save_points(ps, buf)
    back = load_points(buf.getvalue())
    assert back.kind == "vdc" and back.n == 4 and str(back.sigma) == "0101"
    assert np.array_equal(back.xs, ps.xs) and np.array_equal(back.ys, ps.ys)


def test_save_load_file(tmp_path):
    ps = generate_vdc(3, "101")
    path = tmp_path / "v3.txt"
    save_points(ps, path)
    assert load_points(path).same_points(ps)


def test_load_rejects_coordinate_one():
    with pytest.raises(DomainError):
        load_points("#external\n1/2^0 1/2^1\n")


def test_load_reports_line_numbers():
    with pytest.raises(ParseError) as exc:
        load_points("#external\n1/2^1 1/2^1\nnot a point\n")
    assert exc.value.line == 3


def test_external_points():
    ps = load_points("#external\n1/2^2 1/2^2\n1/2^1 3/2^2\n3/2^2 1/2^1\n")
    assert ps.kind == "external" and ps.N == 3


def test_duplicates_rejected():
    with pytest.raises(DuplicatePointError):
        PointSet.from_points([(Fraction(1, 2), Fraction(1, 2))] * 2)
