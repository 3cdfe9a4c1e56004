"""Exact evaluation of the discrepancy function and its cell decomposition.

For a point set ``P`` of size ``N`` the discrepancy function is

    D(x) = #{p in P : p1 < x1 and p2 < x2} - N * x1 * x2.

The counting part is constant on each open cell of the grid spanned by the
point coordinates, so ``D`` is a bilinear polynomial cell by cell.  The
:class:`CellGrid` sweep exposes those per-cell counts column by column, which
is what every exact norm and pairing in the package is built on.
"""

from __future__ import annotations

import bisect
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .dyadic import DigitString, Dyadic, DyadicLike
from .errors import BudgetError, DomainError
from .pointset import PointSet

#: Default cap on the number of cells materialised as a dense matrix.
DENSE_CELL_LIMIT = 1 << 24


def work_budget(default: int = 1 << 26) -> int:
    """The global work cap, overridable with ``DISCREPANCY_LAB_BUDGET``."""
    env = os.environ.get("DISCREPANCY_LAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"DISCREPANCY_LAB_BUDGET={env!r} is not an integer") from None
    return default


def _as_point(x: Sequence[DyadicLike]) -> tuple[Dyadic, Dyadic]:
    x1, x2 = (Dyadic.coerce(c) for c in x)
    if not (0 <= x1 <= 1 and 0 <= x2 <= 1):
        raise DomainError(f"evaluation point ({x1}, {x2}) is outside [0, 1]^2")
    return x1, x2


def count_dominated(ps: PointSet, x: Sequence[DyadicLike]) -> int:
    """``#{p : p1 < x1, p2 < x2}`` (strict inequalities)."""
    x1, x2 = _as_point(x)
    e = max(ps.scale, x1.exponent, x2.exponent)
    xs, ys = ps.rescaled(e)
    return int(np.count_nonzero((xs < x1.scaled_numerator(e)) & (ys < x2.scaled_numerator(e))))


@dataclass(frozen=True)
class DiscrepancyValue:
    count: int
    area_term: Dyadic
    N: int

    @property
    def value(self) -> Dyadic:
        return Dyadic(self.count) - self.area_term

    def __float__(self) -> float:
        return float(self.value)


def eval_discrepancy(ps: PointSet, x: Sequence[DyadicLike]) -> DiscrepancyValue:
    """Exact ``D(x)`` for ``x`` in the closed unit square."""
    x1, x2 = _as_point(x)
    return DiscrepancyValue(count_dominated(ps, (x1, x2)), x1 * x2 * ps.N, ps.N)


class CellGrid:
    """Cell decomposition of ``[0, 1]^2`` by the point coordinates.

    ``xb`` and ``yb`` are the sorted distinct breakpoints (including 0 and 1)
    as numerators over ``2**scale``.  Column ``i`` is the open strip
    ``xb[i] < x < xb[i+1]``; row ``j`` likewise.  On the open cell ``(i, j)``
    the discrepancy is ``count[i, j] - N x1 x2`` where ``count[i, j]`` is the
    number of points with ``p1 <= xb[i]`` and ``p2 <= yb[j]``.
    """

    def __init__(self, ps: PointSet):
        self.ps = ps
        self.scale = ps.scale
        top = 1 << ps.scale
        self._setup(ps.xs, ps.ys, top, top, ps.N)

    @classmethod
    def from_lattice(cls, xs: np.ndarray, ys: np.ndarray, qx: int, qy: int) -> "CellGrid":
        """Grid for points ``(xs / qx, ys / qy)`` with arbitrary integer denominators."""
        grid = cls.__new__(cls)
        grid.ps = None
        grid.scale = None
        grid._setup(np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64), qx, qy, len(xs))
        return grid

    def _setup(self, xs: np.ndarray, ys: np.ndarray, qx: int, qy: int, N: int) -> None:
        self.qx, self.qy = qx, qy
        self.N = N
        dtype = object if max(qx, qy).bit_length() > 62 else np.int64
        self.xb = np.unique(np.concatenate([np.array([0, qx], dtype=dtype), xs]))
        self.yb = np.unique(np.concatenate([np.array([0, qy], dtype=dtype), ys]))
        self._col = np.searchsorted(self.xb, xs)
        self._row = np.searchsorted(self.yb, ys)
        self._order = np.argsort(self._col, kind="stable")
        self._dense = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xb) - 1, len(self.yb) - 1

    @property
    def n_cells(self) -> int:
        a, b = self.shape
        return a * b

    def columns(self) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(i, counts)`` for every column; ``counts`` is reused between steps."""
        ncols, nrows = self.shape
        cnt = np.zeros(nrows, dtype=np.int64)
        cols = self._col[self._order]
        rows = self._row[self._order]
        starts = np.searchsorted(cols, np.arange(ncols + 1))
        for i in range(ncols):
            lo, hi = starts[i], starts[i + 1]
            if hi - lo == 1:
                cnt[rows[lo]:] += 1
            elif hi > lo:
                delta = np.bincount(rows[lo:hi], minlength=nrows + 1)
                cnt += np.cumsum(delta)[:nrows]
            yield i, cnt

    @property
    def counts(self) -> np.ndarray:
        """Dense ``(ncols, nrows)`` matrix of cell counts."""
        if self._dense is None:
            if self.n_cells > DENSE_CELL_LIMIT:
                raise BudgetError(f"{self.n_cells} cells exceed the dense limit; use columns()")
            dense = np.empty(self.shape, dtype=np.int64)
            for i, cnt in self.columns():
                dense[i] = cnt
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def locate(self, x: Sequence[DyadicLike]) -> tuple[int, int]:
        """Cell indices whose counting value applies at ``x``; ``-1`` on the lower edges."""
        x1, x2 = _as_point(x)
        return self._locate(x1.as_fraction(), x2.as_fraction())

    def _locate(self, x1: Fraction, x2: Fraction) -> tuple[int, int]:
        X, Y = x1 * self.qx, x2 * self.qy
        i = bisect.bisect_left(self.xb.tolist(), X) - 1
        j = bisect.bisect_left(self.yb.tolist(), Y) - 1
        return i, j

    def count_at(self, x: Sequence[DyadicLike]) -> int:
        i, j = self.locate(x)
        if i < 0 or j < 0:
            return 0
        return int(self.counts[i, j])

    def evaluate(self, x: Sequence[DyadicLike]) -> Fraction:
        x1, x2 = _as_point(x)
        return self.evaluate_fraction(x1.as_fraction(), x2.as_fraction())

    def evaluate_fraction(self, x1: Fraction, x2: Fraction) -> Fraction:
        """``D`` at any rational point of the closed unit square."""
        i, j = self._locate(Fraction(x1), Fraction(x2))
        count = int(self.counts[i, j]) if i >= 0 and j >= 0 else 0
        return count - self.N * Fraction(x1) * Fraction(x2)

    def breakpoints(self) -> tuple[list[Dyadic], list[Dyadic]]:
        if self.scale is None:
            raise DomainError("breakpoints of a non-dyadic grid are not dyadic")
        s = self.scale
        return ([Dyadic(int(v), s) for v in self.xb.tolist()],
                [Dyadic(int(v), s) for v in self.yb.tolist()])


def build_cell_grid(ps: PointSet) -> CellGrid:
    return CellGrid(ps)


def exact_mean(ps: PointSet) -> Fraction:
    """``int int D`` via ``sum_p (1 - p1)(1 - p2) - N/4``."""
    s = ps.scale
    top = 1 << s
    if 2 * s + max(ps.N, 1).bit_length() < 62 and ps.xs.dtype != object:
        total = int(np.sum((top - ps.xs) * (top - ps.ys)))
    else:
        total = sum((top - int(x)) * (top - int(y)) for x, y in zip(ps.xs, ps.ys))
    return Fraction(total, 1 << (2 * s)) - Fraction(ps.N, 4)


def closed_form_mean(n: int, sigma: DigitString) -> Fraction:
    """``(1/4) (n/2 - sum_k d_k(sigma))``: the mean of ``D`` over ``V_{n, sigma}``."""
    if sigma.n != n:
        raise DomainError(f"sigma has {sigma.n} digits, expected {n}")
    return Fraction(1, 4) * (Fraction(n, 2) - sigma.weight())


def box_integral(ps: PointSet, a: DyadicLike, b: DyadicLike, c: DyadicLike,
                 d: DyadicLike) -> Fraction:
    """Exact ``int_{[a,b] x [c,d]} D``.

    Uses only the definition of ``D``: each point contributes the area of the
    box inside its upper-right quadrant, the linear part integrates in closed
    form.
    """
    a, b, c, d = (Dyadic.coerce(v).as_fraction() for v in (a, b, c, d))
    total = Fraction(0)
    for p in ps.points:
        px, py = p.x.as_fraction(), p.y.as_fraction()
        wx = b - max(a, px)
        wy = d - max(c, py)
        if wx > 0 and wy > 0:
            total += wx * wy
    return total - ps.N * (b * b - a * a) * (d * d - c * c) / 4


def l2_squared_pairwise(ps: PointSet) -> Fraction:
    """``||D||_2^2`` from the pairwise point formula (Warnock form).

    ``sum_{p,q} (1 - max(p1,q1))(1 - max(p2,q2)) - (N/2) sum_p (1-p1^2)(1-p2^2) + N^2/9``.
    Independent of the cell sweep, used to cross-check it.
    """
    s = ps.scale
    top = 1 << s
    N = ps.N
    xs = [int(v) for v in ps.xs.tolist()]
    ys = [int(v) for v in ps.ys.tolist()]
    pair = 0
    if 2 * s + 2 * max(N, 1).bit_length() < 62:
        X = np.asarray(xs, dtype=np.int64)
        Y = np.asarray(ys, dtype=np.int64)
        block = max(1, (1 << 22) // max(N, 1))
        for lo in range(0, N, block):
            mx = top - np.maximum(X[lo:lo + block, None], X[None, :])
            my = top - np.maximum(Y[lo:lo + block, None], Y[None, :])
            pair += int(np.sum(mx * my))
    else:
        for x1, y1 in zip(xs, ys):
            for x2, y2 in zip(xs, ys):
                pair += (top - max(x1, x2)) * (top - max(y1, y2))
    cross = sum((top * top - x * x) * (top * top - y * y) for x, y in zip(xs, ys))
    return (Fraction(pair, 1 << (2 * s))
            - Fraction(N, 2) * Fraction(cross, 1 << (4 * s))
            + Fraction(N * N, 9))


# -- general N -------------------------------------------------------------------

def general_n_lattice(n: int, sigma: DigitString, N: int) -> tuple[np.ndarray, np.ndarray, int, int]:
    """An ``N``-point set for ``2^(n-1) < N < 2^n`` built from ``V_{n, sigma}``.

    The first ``N + 1`` points are stretched horizontally by ``1/t`` with
    ``t = (2N + 1) / 2^(n+1)``, so point ``tau`` moves to ``x = (2 tau + 1) / (2N + 1)``.
    Point ``tau = N`` lands on ``x = 1`` and never counts, leaving ``N`` points.
    Returns numerators and the denominators ``(2N + 1, 2^(n+1))``.
    """
    from .pointset import general_n_set

    ps = general_n_set(n, sigma, N)
    return ps.xs[:N].copy(), ps.ys[:N].copy(), 2 * N + 1, 1 << (n + 1)


def general_n_grid(n: int, sigma: DigitString, N: int) -> CellGrid:
    return CellGrid.from_lattice(*general_n_lattice(n, sigma, N))


def general_n_delta(truncated: PointSet, x: Sequence[DyadicLike]) -> Fraction:
    """``#{tau <= N : v(tau) < (t x1, x2)} - N x1 x2`` from the truncated dyadic set.

    This is the discrepancy function of the stretched ``N``-point set of
    :func:`general_n_lattice`, evaluated without leaving dyadic arithmetic.
    """
    if truncated.kind != "vdc-truncated":
        raise DomainError("need a truncated van der Corput set")
    x1, x2 = _as_point(x)
    N = truncated.N - 1
    t = Dyadic(2 * N + 1, truncated.n + 1)
    return Fraction(count_dominated(truncated, (t * x1, x2))) - N * (x1 * x2).as_fraction()
