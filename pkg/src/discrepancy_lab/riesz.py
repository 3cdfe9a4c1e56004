"""Riesz products of r-functions and the duality lower bound for exp(L^alpha) norms.

For a lacunary family ``G`` of parameters ``r = (r1, r2)`` with ``r1 + r2 = m``
and ``r1`` a multiple of ``a``,

    Psi = prod_{r in G} (1 + f_r),    Psi~ = Psi - 1,

where ``f_r`` is the r-function carrying the signs of the Haar coefficients
of ``D``.  ``Psi`` equals ``2^g`` on a set of measure ``2^-g`` and vanishes
elsewhere, so ``Psi~`` is two-valued and its ``L(log L)^{1/alpha}`` norm is a
one-dimensional bisection.  Pairing ``D`` against ``Psi~`` divided by that
norm bounds ``||D||_{exp(L^alpha)}`` from below.

All grid computations run over blocks of rows so that only a slab of the
``2^Mx x 2^My`` grid is held in memory at a time.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .dyadic import render
from .errors import BudgetError, DomainError, ResolutionError
from .haar import RFunction, build_r_function, product_r, r_inner
from .norms import OrliczSpec, OrliczValue, orlicz_norm
from .pointset import PointSet

#: Largest grid (in cells) a Riesz product may occupy.
GRID_BUDGET = 1 << 28

#: Cells per processed slab.
BLOCK_CELLS = 1 << 21


def riesz_index(N: int) -> int:
    """The ``m`` with ``2N < 2^m <= 4N``."""
    if N < 1:
        raise DomainError("need at least one point")
    return (2 * N).bit_length()


def select_G(m: int, a: int) -> list[tuple[int, int]]:
    """``{r : r1 + r2 = m, a | r1}`` in increasing ``r1``."""
    if a < 1:
        raise DomainError(f"spacing a must be at least 1, got {a}")
    return [(r1, m - r1) for r1 in range(0, m + 1, a)]


@dataclass
class RieszGrid:
    """The r-functions of ``G`` on a common ``2^mx x 2^my`` grid."""

    fs: list[RFunction]
    mx: int
    my: int

    @property
    def g(self) -> int:
        return len(self.fs)

    @property
    def n_cells(self) -> int:
        return 1 << (self.mx + self.my)

    def row_blocks(self) -> Iterator[tuple[int, int]]:
        """Row ranges ``[y0, y1)`` from the top of the square downwards."""
        height = max(1, BLOCK_CELLS >> self.mx)
        top = 1 << self.my
        while top > 0:
            lo = max(0, top - height)
            yield lo, top
            top = lo

    def factors(self, y0: int, y1: int) -> list[np.ndarray]:
        return [f.block(self.mx, self.my, y0, y1) for f in self.fs]

    def psi_block(self, y0: int, y1: int) -> np.ndarray:
        out = np.ones((1 << self.mx, y1 - y0), dtype=np.int64)
        for v in self.factors(y0, y1):
            out *= 1 + v
        return out

    def elementary_blocks(self, y0: int, y1: int) -> list[np.ndarray]:
        """``e_0 .. e_g`` of the factor values: ``Psi = sum_k e_k``."""
        e = [np.ones((1 << self.mx, y1 - y0), dtype=np.int64)]
        for v in self.factors(y0, y1):
            v = v.astype(np.int64)
            e.append(np.zeros_like(e[0]))
            for k in range(len(e) - 1, 0, -1):
                e[k] = e[k] + v * e[k - 1]
        return e


def build_riesz(ps: PointSet, G: Sequence[tuple[int, int]], budget: int | None = None) -> RieszGrid:
    fs = [build_r_function(ps, r) for r in G]
    s = ps.scale
    mx = max([f.r[0] + 1 for f in fs] + [s])
    my = max([f.r[1] + 1 for f in fs] + [s])
    limit = GRID_BUDGET if budget is None else budget
    if (1 << (mx + my)) > limit:
        raise BudgetError(f"Riesz grid 2^{mx} x 2^{my} exceeds the budget of {limit} cells")
    return RieszGrid(fs, mx, my)


@dataclass(frozen=True)
class StructureReport:
    g: int
    values: tuple[int, ...]
    top_measure: Fraction
    integral: Fraction

    @property
    def ok(self) -> bool:
        return (set(self.values) <= {0, 1 << self.g} and self.top_measure == Fraction(1, 1 << self.g)
                and self.integral == 1)


def structure(grid: RieszGrid) -> StructureReport:
    """Distinct values of ``Psi``, the measure where it is largest and its integral."""
    values: set[int] = set()
    top = 0
    total = 0
    for y0, y1 in grid.row_blocks():
        psi = grid.psi_block(y0, y1)
        values.update(np.unique(psi).tolist())
        top += int(np.count_nonzero(psi == (1 << grid.g)))
        total += int(psi.sum())
    cells = grid.n_cells
    return StructureReport(grid.g, tuple(sorted(values)), Fraction(top, cells), Fraction(total, cells))


def _aligned(ps: PointSet, mx: int, my: int) -> tuple[np.ndarray, np.ndarray]:
    s = ps.scale
    if s > mx or s > my:
        raise ResolutionError(f"points need 2^-{s} resolution, grid is 2^-{mx} x 2^-{my}")
    return ps.xs << (mx - s), ps.ys << (my - s)


class _Pairing:
    """Accumulates ``<D, w>`` for cellwise-constant ``w`` fed block by block from the top."""

    def __init__(self, ps: PointSet, mx: int, my: int):
        self.N = ps.N
        self.mx, self.my = mx, my
        self.X, self.Y = _aligned(ps, mx, my)
        self.above = np.zeros(1 << mx, dtype=np.int64)
        self.count_sum = 0
        self.linear_sum = 0
        self.odd_x = 2 * np.arange(1 << mx, dtype=np.int64) + 1

    def feed(self, y0: int, y1: int, w: np.ndarray) -> None:
        # suffix sums in y within the block, plus everything above it
        col = np.cumsum(w[:, ::-1], axis=1)[:, ::-1] + self.above[:, None]
        ss = np.cumsum(col[::-1], axis=0)[::-1]
        sel = (self.Y >= y0) & (self.Y < y1)
        if np.any(sel):
            self.count_sum += int(ss[self.X[sel], self.Y[sel] - y0].sum())
        self.above += w.sum(axis=1)
        rows = self.odd_x @ w
        odd_y = 2 * np.arange(y0, y1, dtype=np.int64) + 1
        self.linear_sum += int(np.dot(rows.astype(object), odd_y.astype(object)))

    def value(self) -> Fraction:
        e = self.mx + self.my
        return Fraction(self.count_sum, 1 << e) - Fraction(self.N * self.linear_sum, 4 << (2 * e))


def pair(ps: PointSet, mx: int, my: int,
         blocks: Callable[[int, int], np.ndarray], height: int | None = None) -> Fraction:
    """Exact ``<D, w>`` for ``w`` given slab by slab on the ``2^mx x 2^my`` grid.

    ``blocks(y0, y1)`` returns the ``(2^mx, y1 - y0)`` integer values of ``w``.
    """
    acc = _Pairing(ps, mx, my)
    height = height or max(1, BLOCK_CELLS >> mx)
    top = 1 << my
    while top > 0:
        lo = max(0, top - height)
        acc.feed(lo, top, blocks(lo, top))
        top = lo
    return acc.value()


def pair_dense(ps: PointSet, w: np.ndarray) -> Fraction:
    """``<D, w>`` for a dense ``(2^mx, 2^my)`` integer array."""
    w = np.asarray(w, dtype=np.int64)
    mx, my = int(np.log2(w.shape[0])), int(np.log2(w.shape[1]))
    if w.shape != (1 << mx, 1 << my):
        raise ResolutionError("grid sides must be powers of two")
    return pair(ps, mx, my, lambda y0, y1: w[:, y0:y1])


def order_pairings(ps: PointSet, grid: RieszGrid) -> list[Fraction]:
    """``<D, e_k>`` for ``k = 1..g`` where ``e_k`` is the order-``k`` part of ``Psi~``."""
    accs = [_Pairing(ps, grid.mx, grid.my) for _ in range(grid.g)]
    for y0, y1 in grid.row_blocks():
        e = grid.elementary_blocks(y0, y1)
        for k in range(1, grid.g + 1):
            accs[k - 1].feed(y0, y1, e[k])
    return [a.value() for a in accs]


def term_pairings(ps: PointSet, fs: Sequence[RFunction]) -> list[tuple[tuple[int, int], int, Fraction]]:
    """``(s, v, <D, prod_{r in S} f_r>)`` for every subset ``S`` with at least two members.

    Each product is an r-function, so its pairing is a signed sum of exact
    Haar coefficients.
    """
    out = []
    for v in range(2, len(fs) + 1):
        for subset in itertools.combinations(fs, v):
            prod = product_r(list(subset))
            out.append((prod.r, v, r_inner(ps, prod)))
    return out


def psi_tilde_norm(g: int, alpha: float) -> OrliczValue:
    """``L(log L)^{1/alpha}`` norm of the two-valued ``Psi~``."""
    P = 2.0 ** -g
    return orlicz_norm([2.0 ** g - 1.0, 1.0], [P, 1.0 - P], OrliczSpec(alpha, "llog"))


@dataclass
class Certificate:
    n: int | None
    N: int
    m: int
    a: int
    alpha: float
    G: list
    pairing: Fraction
    first_order: Fraction
    orders: list
    psi_norm: OrliczValue
    structure: StructureReport
    extra: dict = field(default_factory=dict)

    @property
    def g(self) -> int:
        return len(self.G)

    @property
    def lower_bound(self) -> float:
        return float(self.pairing) / self.psi_norm.value

    @property
    def lower_bracket(self) -> tuple[float, float]:
        p = float(self.pairing)
        return p / self.psi_norm.upper, p / self.psi_norm.lower

    def as_dict(self) -> dict:
        return {
            "n": self.n, "N": self.N, "m": self.m, "a": self.a, "alpha": self.alpha,
            "G": [list(r) for r in self.G], "g": self.g,
            "pairing": render(self.pairing), "pairing_float": float(self.pairing),
            "first_order": render(self.first_order),
            "orders": [render(v) for v in self.orders],
            "psi_norm": self.psi_norm.as_dict(),
            "lower_bound": self.lower_bound,
            "lower_bound_bracket": list(self.lower_bracket),
            "structure": {"values": list(self.structure.values),
                          "top_measure": render(self.structure.top_measure),
                          "integral": render(self.structure.integral), "ok": self.structure.ok},
            **self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


@dataclass
class RieszRun:
    """Everything about ``Psi`` that does not depend on ``alpha``."""

    ps: PointSet
    m: int
    a: int
    G: list
    grid: RieszGrid
    structure: StructureReport
    orders: list
    first_order: Fraction

    @property
    def pairing(self) -> Fraction:
        return sum(self.orders, Fraction(0))

    def certificate(self, alpha: float) -> Certificate:
        if alpha < 2:
            raise DomainError(f"the certificate needs alpha >= 2, got {alpha}")
        return Certificate(self.ps.n, self.ps.N, self.m, self.a, alpha, list(self.G), self.pairing,
                           self.first_order, list(self.orders), psi_tilde_norm(len(self.G), alpha),
                           self.structure)


def riesz_run(ps: PointSet, a: int = 3, m: int | None = None, budget: int | None = None) -> RieszRun:
    m = riesz_index(ps.N) if m is None else m
    G = select_G(m, a)
    grid = build_riesz(ps, G, budget)
    orders = order_pairings(ps, grid)
    first = sum((r_inner(ps, f) for f in grid.fs), Fraction(0))
    return RieszRun(ps, m, a, G, grid, structure(grid), orders, first)


def certify_lower(ps: PointSet, alpha: float, a: int = 3, m: int | None = None,
                  budget: int | None = None) -> Certificate:
    """``<D, Psi~> / ||Psi~||_{L(log L)^{1/alpha}}``, a lower bound for ``||D||_{exp(L^alpha)}``."""
    if alpha < 2:
        raise DomainError(f"the certificate needs alpha >= 2, got {alpha}")
    return riesz_run(ps, a, m, budget).certificate(alpha)


def first_order_dominates(run: RieszRun) -> bool:
    """Whether the first-order pairing exceeds the sum of all higher orders in size."""
    tail = sum((abs(v) for v in run.orders[1:]), Fraction(0))
    return run.orders[0] > tail if run.orders else False


def lower_bound_ratio(cert: Certificate, n: int) -> float:
    return cert.lower_bound / n ** (1.0 - 1.0 / cert.alpha)


def sweep_spacing(ps: PointSet, spacings: Sequence[int] = (1, 2, 3, 4, 5, 6)) -> list[dict]:
    """Per spacing ``a``: orders, whether the first order dominates, and the pairing."""
    rows = []
    for a in spacings:
        run = riesz_run(ps, a)
        rows.append({"a": a, "g": len(run.G), "pairing": float(run.pairing),
                     "first_order": float(run.orders[0]),
                     "higher_orders": float(run.pairing - run.orders[0]),
                     "dominates": first_order_dominates(run)})
    return rows

