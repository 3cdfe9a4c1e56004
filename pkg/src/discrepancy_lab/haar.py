"""Exact Haar coefficients of the discrepancy function and r-function algebra.

Haar functions are L-infinity normalised: ``h_I = -1`` on the left half of
``I`` and ``+1`` on the right half.  For a dyadic rectangle ``R = I x J``

* ``<x1 x2, h_R> = |R|^2 / 16``, so the linear part contributes ``N |R|^2 / 16``;
* ``<1_{[p,1)}, h_R> = |R| phi(2^k p1) phi(2^l p2)`` when ``p`` lies in ``R``
  and vanishes otherwise.

Only rectangles that hold a point carry a counting contribution, so all
coefficients of one shape ``(k, l)`` are stored sparsely: a common value for
the empty rectangles plus one entry per occupied rectangle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .discrepancy import exact_mean, work_budget
from .dyadic import Dyadic, DyadicLike, phi_numerators
from .errors import BudgetError, HypothesisError, RangeError, ShapeError
from .pointset import DyadicInterval, DyadicRectangle, PointSet, UNIT, cell_keys

HaarType = tuple[int, int]
TYPES: tuple[HaarType, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))

#: Default number of rectangle evaluations allowed in one exhaustive scan.
DEFAULT_SCAN_BUDGET = 1 << 26


def _one_d(level: int, index: int, eps: int, x: Dyadic) -> int:
    iv = DyadicInterval(level, index)
    if not iv.contains(x) and not (x == 1 and iv.right == 1):
        return 0
    if eps == 1:
        return 1
    mid = iv.left + Dyadic(1, level + 1)
    return -1 if x < mid else 1


def haar_eval(R: DyadicRectangle, t: HaarType, x: Sequence[DyadicLike]) -> int:
    """Value of ``h_R^t`` at ``x``: ``-1``, ``0`` or ``+1``."""
    x1, x2 = (Dyadic.coerce(c) for c in x)
    return (_one_d(R.rx.level, R.rx.index, t[0], x1)
            * _one_d(R.ry.level, R.ry.index, t[1], x2))


@dataclass(frozen=True)
class CoeffRecord:
    R: DyadicRectangle
    type: HaarType
    linear: Fraction
    counting: Fraction

    @property
    def total(self) -> Fraction:
        return self.counting - self.linear


def _use_object(bits: int) -> bool:
    return bits >= 62


def _group_sum(keys: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum integer ``values`` per distinct key, exactly."""
    if len(keys) == 0:
        return keys[:0], values[:0]
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    v = values[order]
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    return k[starts], np.add.reduceat(v, starts)


@dataclass
class LevelCoeffs:
    """All coefficients of one family of equally sized Haar functions.

    The coefficient of entry ``key`` is ``num / 2**exponent`` where ``num`` is
    ``nums[idx]`` if ``key == keys[idx]`` and ``empty_num`` otherwise.
    """

    size: int
    keys: np.ndarray
    nums: np.ndarray
    empty_num: int
    exponent: int
    linear_num: int
    shape: tuple = ()

    @property
    def n_occupied(self) -> int:
        return len(self.keys)

    @property
    def n_empty(self) -> int:
        return self.size - len(self.keys)

    def total(self, key: int) -> Fraction:
        idx = np.searchsorted(self.keys, key)
        if idx < len(self.keys) and self.keys[idx] == key:
            return Fraction(int(self.nums[idx]), 1 << self.exponent)
        return Fraction(self.empty_num, 1 << self.exponent)

    def linear(self) -> Fraction:
        return Fraction(self.linear_num, 1 << self.exponent)

    def lookup_nums(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys)
        idx = np.searchsorted(self.keys, keys)
        idx_c = np.minimum(idx, max(len(self.keys) - 1, 0))
        hit = (idx < len(self.keys)) & (self.keys[idx_c] == keys) if len(self.keys) else np.zeros(len(keys), bool)
        out = np.full(len(keys), self.empty_num, dtype=self.nums.dtype if len(self.keys) else np.int64)
        if len(self.keys):
            out[hit] = self.nums[idx_c[hit]]
        return out

    def dense_nums(self) -> np.ndarray:
        dtype = self.nums.dtype if len(self.nums) else np.int64
        out = np.full(self.size, self.empty_num, dtype=dtype)
        out[self.keys] = self.nums
        return out

    def max_abs_num(self) -> int:
        best = abs(self.empty_num) if self.n_empty else 0
        if len(self.nums):
            best = max(best, int(np.max(np.abs(self.nums))))
        return best

    def max_abs(self) -> Fraction:
        return Fraction(self.max_abs_num(), 1 << self.exponent)

    def argmax_abs(self) -> int:
        """Flat key attaining the largest ``|total|`` (first in key order)."""
        best_key, best = -1, -1
        if len(self.nums):
            i = int(np.argmax(np.abs(self.nums)))
            best_key, best = int(self.keys[i]), abs(int(self.nums[i]))
        if self.n_empty and abs(self.empty_num) >= best:
            occupied = set(self.keys.tolist())
            first_empty = next(k for k in range(self.size) if k not in occupied)
            if abs(self.empty_num) > best or first_empty < best_key:
                best_key, best = first_empty, abs(self.empty_num)
        return best_key

    def sum_squares_num(self) -> int:
        """``sum over all entries of num**2`` as an exact integer."""
        occ = sum(int(v) * int(v) for v in self.nums.tolist())
        return occ + self.n_empty * self.empty_num * self.empty_num


def _scaled_xy(ps: PointSet, min_scale: int) -> tuple[np.ndarray, np.ndarray, int]:
    s = max(ps.scale, min_scale)
    xs, ys = ps.rescaled(s)
    return xs, ys, s


@lru_cache(maxsize=4096)
def _shape_coeffs_cached(ps_id: int, ps: PointSet, k: int, l: int) -> LevelCoeffs:
    return _compute_shape_coeffs(ps, k, l)


def shape_coeffs(ps: PointSet, k: int, l: int) -> LevelCoeffs:
    """Exact ``<D, h_R>`` for every rectangle of shape ``(k, l)`` (key ``i * 2**l + j``)."""
    return _shape_coeffs_cached(id(ps), ps, k, l)


def _compute_shape_coeffs(ps: PointSet, k: int, l: int) -> LevelCoeffs:
    xs, ys, s = _scaled_xy(ps, 0)
    N = ps.N
    E = max(2 * s + k + l, 2 * (k + l) + 4)
    count_shift = E - (2 * s + k + l)
    linear_num = N << (E - 2 * (k + l) - 4)
    big = _use_object(2 * s + max(N, 1).bit_length() + count_shift + 1) or xs.dtype == object
    fx = phi_numerators(xs, k, s)
    fy = phi_numerators(ys, l, s)
    if big:
        prod = np.array([int(a) * int(b) for a, b in zip(fx, fy)], dtype=object)
    else:
        prod = fx * fy
    keys = cell_keys(ps, k, l)
    keys, sums = _group_sum(keys, prod)
    if big:
        nums = np.array([(int(v) << count_shift) - linear_num for v in sums], dtype=object)
    else:
        nums = (sums << count_shift) - linear_num
    return LevelCoeffs(1 << (k + l), keys, nums, -linear_num, E, linear_num, (k, l))


def semi_coeffs(ps: PointSet, level: int, axis: int = 0) -> LevelCoeffs:
    """Exact ``<D, h^{0,1}_{I x [0,1]}>`` (``axis=0``) or ``<D, h^{1,0}_{[0,1] x I}>`` (``axis=1``).

    Keys are the interval indices ``i`` of ``I`` at the given level.
    """
    xs, ys, s = _scaled_xy(ps, 0)
    if axis == 1:
        xs, ys = ys, xs
    N = ps.N
    k = level
    # counting: |I| phi(2^k u) (1 - v), over 2^(2s + k); linear: N |I|^2 / 8
    E = max(2 * s + k, 2 * k + 3)
    count_shift = E - (2 * s + k)
    linear_num = N << (E - 2 * k - 3)
    big = _use_object(2 * s + max(N, 1).bit_length() + count_shift + 1) or xs.dtype == object
    fx = phi_numerators(xs, k, s)
    rest = (1 << s) - ys
    if big:
        prod = np.array([int(a) * int(b) for a, b in zip(fx, rest)], dtype=object)
    else:
        prod = fx * rest
    keys = xs >> (s - k) if k <= s else xs << (k - s)
    keys, sums = _group_sum(np.asarray(keys), prod)
    if big:
        nums = np.array([(int(v) << count_shift) - linear_num for v in sums], dtype=object)
    else:
        nums = (sums << count_shift) - linear_num
    return LevelCoeffs(1 << k, keys, nums, -linear_num, E, linear_num, (k,))


def haar_coeff(ps: PointSet, R: DyadicRectangle, t: HaarType = (0, 0)) -> CoeffRecord:
    """Exact ``<D, h_R^t>`` split into its counting and linear parts."""
    t = tuple(t)
    k, l = R.shape
    if t == (0, 0):
        c = shape_coeffs(ps, k, l)
        key = (R.rx.index << l) | R.ry.index
        total = c.total(key)
        return CoeffRecord(R, t, c.linear(), total + c.linear())
    if t == (0, 1):
        if R.ry != UNIT:
            raise ShapeError("type (0,1) needs R = I x [0,1]")
        c = semi_coeffs(ps, k, axis=0)
        total = c.total(R.rx.index)
        return CoeffRecord(R, t, c.linear(), total + c.linear())
    if t == (1, 0):
        if R.rx != UNIT:
            raise ShapeError("type (1,0) needs R = [0,1] x I")
        c = semi_coeffs(ps, l, axis=1)
        total = c.total(R.ry.index)
        return CoeffRecord(R, t, c.linear(), total + c.linear())
    if t == (1, 1):
        if R.rx != UNIT or R.ry != UNIT:
            raise ShapeError("type (1,1) needs R = [0,1]^2")
        linear = Fraction(ps.N, 4)
        return CoeffRecord(R, t, linear, exact_mean(ps) + linear)
    raise ShapeError(f"unknown Haar type {t}")


# -- scans -------------------------------------------------------------------

def shapes_with_volume(m: int) -> list[tuple[int, int]]:
    """Shapes ``(k, l)`` with ``k + l = m``."""
    return [(k, m - k) for k in range(m + 1)] if m >= 0 else []


def shapes_up_to(m: int) -> list[tuple[int, int]]:
    """Shapes with ``|R| >= 2**-m``, ordered by ``k`` then ``l``."""
    return [(k, l) for k in range(m + 1) for l in range(m + 1 - k)]


def selector(m: int | None, *, exact: bool = False) -> list[tuple[int, int]]:
    """Shape list for ``|R| = 2**-m`` (``exact``) or ``|R| >= 2**-m``; ``None`` is empty."""
    if m is None:
        return []
    return shapes_with_volume(m) if exact else shapes_up_to(m)


@dataclass
class ScanAggregate:
    N: int
    count: int = 0
    max_abs: Fraction = Fraction(0)
    argmax: DyadicRectangle | None = None
    histogram: dict = field(default_factory=dict)

    @property
    def scaled_max(self) -> Fraction:
        """``N * max |<D, h_R>|``."""
        return self.N * self.max_abs

    def _bucket(self, value: Fraction) -> int | None:
        if value == 0:
            return None
        v = self.N * value
        b = v.numerator.bit_length() - v.denominator.bit_length()
        if Fraction(1 << b) > v if b >= 0 else Fraction(1, 1 << -b) > v:
            b -= 1
        return b

    def add(self, value: Fraction, R: DyadicRectangle, multiplicity: int = 1) -> None:
        value = abs(value)
        self.count += multiplicity
        b = self._bucket(value)
        self.histogram[b] = self.histogram.get(b, 0) + multiplicity
        if value > self.max_abs or self.argmax is None:
            self.max_abs, self.argmax = value, R


class Scan:
    """A deterministic scan over Haar coefficients of type ``(0,0)``."""

    def __init__(self, ps: PointSet, shapes: Iterable[tuple[int, int]], mode: str = "exhaustive",
                 count: int = 0, seed: int = 0, budget: int | None = None):
        self.ps = ps
        self.shapes = list(shapes)
        self.mode = mode
        self.count = count
        self.seed = seed
        if mode == "exhaustive":
            total = sum(1 << (k + l) for k, l in self.shapes)
            limit = budget if budget is not None else work_budget(DEFAULT_SCAN_BUDGET)
            if total > limit:
                raise BudgetError(
                    f"exhaustive scan needs {total} rectangle evaluations (budget {limit}); "
                    "use sampled mode")
        elif mode != "sampled":
            raise ValueError(f"unknown scan mode {mode!r}")

    def _samples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng(self.seed)
        if not self.shapes:
            z = np.zeros(0, dtype=np.int64)
            return z, z, z
        shape_idx = rng.integers(0, len(self.shapes), size=self.count)
        sizes = np.array([1 << (k + l) for k, l in self.shapes], dtype=np.int64)
        keys = (rng.random(self.count) * sizes[shape_idx]).astype(np.int64)
        return shape_idx, keys, sizes

    def records(self) -> Iterator[CoeffRecord]:
        if self.mode == "exhaustive":
            for k, l in self.shapes:
                c = shape_coeffs(self.ps, k, l)
                dense = c.dense_nums()
                lin = c.linear()
                den = 1 << c.exponent
                for key in range(c.size):
                    total = Fraction(int(dense[key]), den)
                    R = DyadicRectangle.of(k, key >> l, l, key & ((1 << l) - 1))
                    yield CoeffRecord(R, (0, 0), lin, total + lin)
            return
        shape_idx, keys, _ = self._samples()
        for si, key in zip(shape_idx.tolist(), keys.tolist()):
            k, l = self.shapes[si]
            c = shape_coeffs(self.ps, k, l)
            total = c.total(key)
            R = DyadicRectangle.of(k, key >> l, l, key & ((1 << l) - 1))
            yield CoeffRecord(R, (0, 0), c.linear(), total + c.linear())

    def aggregate(self) -> ScanAggregate:
        agg = ScanAggregate(self.ps.N)
        if self.mode == "exhaustive":
            for k, l in self.shapes:
                c = shape_coeffs(self.ps, k, l)
                den = 1 << c.exponent
                for key, num in zip(c.keys.tolist(), c.nums.tolist()):
                    R = DyadicRectangle.of(k, key >> l, l, key & ((1 << l) - 1))
                    agg.add(Fraction(int(num), den), R)
                if c.n_empty:
                    key = c.argmax_abs() if abs(c.empty_num) >= c.max_abs_num() else None
                    if key is None:
                        occupied = set(c.keys.tolist())
                        key = next(q for q in range(c.size) if q not in occupied)
                    R = DyadicRectangle.of(k, key >> l, l, key & ((1 << l) - 1))
                    agg.add(Fraction(c.empty_num, den), R, c.n_empty)
            return agg
        shape_idx, keys, _ = self._samples()
        for si, (k, l) in enumerate(self.shapes):
            sel = shape_idx == si
            if not np.any(sel):
                continue
            c = shape_coeffs(self.ps, k, l)
            nums = c.lookup_nums(keys[sel])
            den = 1 << c.exponent
            for key, num in zip(keys[sel].tolist(), nums.tolist()):
                R = DyadicRectangle.of(k, key >> l, l, key & ((1 << l) - 1))
                agg.add(Fraction(int(num), den), R)
        return agg


def scan_coeffs(ps: PointSet, shapes: Iterable[tuple[int, int]], mode: str = "exhaustive",
                count: int = 0, seed: int = 0, budget: int | None = None) -> Scan:
    return Scan(ps, shapes, mode, count=count, seed=seed, budget=budget)


def max_scaled_coefficient(ps: PointSet, shapes: Iterable[tuple[int, int]]) -> Fraction:
    """``N * max |<D, h_R>|`` over every rectangle of the given shapes (exact, sparse)."""
    best = Fraction(0)
    for k, l in shapes:
        best = max(best, shape_coeffs(ps, k, l).max_abs())
    return ps.N * best


def sampled_max_scaled_coefficient(ps: PointSet, max_level: int, count: int,
                                   seed: int = 0) -> Fraction:
    """``N * max |<D, h_R>|`` over ``count`` seeded random rectangles with ``|R| >= 2**-max_level``."""
    scan = Scan(ps, shapes_up_to(max_level), "sampled", count=count, seed=seed)
    shape_idx, keys, _ = scan._samples()
    best = Fraction(0)
    for si, (k, l) in enumerate(scan.shapes):
        sel = shape_idx == si
        if not np.any(sel):
            continue
        c = shape_coeffs(ps, k, l)
        m = int(np.max(np.abs(c.lookup_nums(keys[sel]))))
        best = max(best, Fraction(m, 1 << c.exponent))
    return ps.N * best


def write_scan_csv(records: Iterable[CoeffRecord], fh) -> int:
    from .dyadic import render

    fh.write("k,i,l,j,eps_x,eps_y,linear,counting,total\n")
    n = 0
    for rec in records:
        R = rec.R
        fh.write(f"{R.rx.level},{R.rx.index},{R.ry.level},{R.ry.index},{rec.type[0]},{rec.type[1]},"
                 f"{render(rec.linear)},{render(rec.counting)},{render(rec.total)}\n")
        n += 1
    return n


# -- quadruple cancellation ---------------------------------------------------

def _check_quadruple_shape(ps: PointSet, k: int, l: int) -> None:
    if ps.kind != "vdc":
        raise ShapeError("quadruple residuals need a full van der Corput set")
    if k + l > ps.n - 2:
        raise ShapeError(f"|R| = 2^-{k + l} is below 4/N = 2^-{ps.n - 2}")


def _quadruple_sums(ps: PointSet, k: int, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Per quadruple: rectangle key and ``sum phi phi`` numerator over ``2**(2s)``."""
    n, s = ps.n, ps.scale
    xs, ys = ps.xs, ps.ys
    fx = phi_numerators(xs, k, s)
    fy = phi_numerators(ys, l, s)
    rect = cell_keys(ps, k, l)
    # x digit k+1 is bit n-k of the numerator, digit n-l is bit l+1
    free = (1 << (n - k)) | (1 << (l + 1))
    quad = (rect << (s + 1)) | (xs & ~free)
    qkeys, sums = _group_sum(quad, fx * fy)
    return qkeys >> (s + 1), sums


def quadruple_residual(ps: PointSet, R: DyadicRectangle) -> list[Fraction]:
    """``| sum_{p in Q} <1_[p,1), h_R> - |R|/4 |`` for each quadruple ``Q`` of points in ``R``."""
    k, l = R.shape
    _check_quadruple_shape(ps, k, l)
    rkeys, sums = _quadruple_sums(ps, k, l)
    key = (R.rx.index << l) | R.ry.index
    quarter = 1 << (2 * ps.scale - 2)
    den = 1 << (2 * ps.scale + k + l)
    return [Fraction(abs(int(v) - quarter), den) for v in sums[rkeys == key].tolist()]


def quadruple_worst_ratio(ps: PointSet, k: int, l: int) -> tuple[Fraction, int]:
    """Largest ``residual * N^2 |R|`` over all quadruples of all rectangles of shape ``(k, l)``.

    Returns the ratio and the number of quadruples examined.
    """
    _check_quadruple_shape(ps, k, l)
    _, sums = _quadruple_sums(ps, k, l)
    quarter = 1 << (2 * ps.scale - 2)
    worst = int(np.max(np.abs(sums - quarter))) if len(sums) else 0
    # residual = worst / 2^(2s+k+l); bound = 2^(k+l-2n); s = n+1
    return Fraction(worst, 1 << (2 * (k + l) + 2)), len(sums)


# -- r-functions ---------------------------------------------------------------

def hyperbolic_vectors(n: int) -> list[tuple[int, int]]:
    """``H_n``: all ``(r1, r2)`` with ``r1 + r2 = n``, increasing ``r1``."""
    return [(r1, n - r1) for r1 in range(n + 1)]


@dataclass(frozen=True, eq=False)
class RFunction:
    """``sum_R signs[R] h_R`` over all rectangles of shape ``r``.

    ``signs`` has shape ``(2**r1, 2**r2)`` with entries in ``{-1, +1}``.
    """

    r: tuple[int, int]
    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int8)
        if signs.shape != (1 << self.r[0], 1 << self.r[1]):
            raise ShapeError(f"sign table {signs.shape} does not match r = {self.r}")
        if not np.all(np.abs(signs) == 1):
            raise ShapeError("signs must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    @property
    def index(self) -> int:
        return self.r[0] + self.r[1]

    def values(self, mx: int | None = None, my: int | None = None) -> np.ndarray:
        """Values on the ``2**mx x 2**my`` grid of cells (default: the coarsest exact grid)."""
        r1, r2 = self.r
        mx = r1 + 1 if mx is None else mx
        my = r2 + 1 if my is None else my
        if mx <= r1 or my <= r2:
            raise ShapeError("grid too coarse to resolve the Haar functions")
        return (self.signs_on_grid(mx, my) * haar_pattern(r1, mx)[:, None]
                * haar_pattern(r2, my)[None, :]).astype(np.int8)

    def signs_on_grid(self, mx: int, my: int, rows: slice = slice(None)) -> np.ndarray:
        r1, r2 = self.r
        ix = np.arange(1 << mx) >> (mx - r1)
        iy = np.arange(1 << my)[rows] >> (my - r2)
        return self.signs[ix[:, None], iy[None, :]]

    def block(self, mx: int, my: int, y0: int, y1: int) -> np.ndarray:
        """Values on the grid restricted to rows ``y0:y1``."""
        r1, r2 = self.r
        hy = haar_pattern(r2, my)[y0:y1]
        return (self.signs_on_grid(mx, my, slice(y0, y1)) * haar_pattern(r1, mx)[:, None]
                * hy[None, :]).astype(np.int8)

    def negated(self) -> "RFunction":
        return RFunction(self.r, -self.signs)


def haar_pattern(r: int, m: int) -> np.ndarray:
    """``h_I(x)`` sign on the ``2**m`` grid for intervals of level ``r`` (``m > r``)."""
    idx = np.arange(1 << m)
    return np.where((idx >> (m - r - 1)) & 1, 1, -1).astype(np.int8)


def build_r_function(ps: PointSet, r: tuple[int, int]) -> RFunction:
    """``f_r = sum_R sgn(<D, h_R>) h_R`` with ``sgn(0) = +1``."""
    r1, r2 = r
    c = shape_coeffs(ps, r1, r2)
    signs = np.where(c.dense_nums() >= 0, 1, -1).astype(np.int8)
    return RFunction((r1, r2), signs.reshape(1 << r1, 1 << r2))


def r_inner(ps: PointSet, f: RFunction) -> Fraction:
    """Exact ``<D, f>``."""
    c = shape_coeffs(ps, *f.r)
    nums = c.dense_nums()
    signs = f.signs.reshape(-1)
    if nums.dtype == object or c.max_abs_num().bit_length() + f.index >= 62:
        total = sum(int(s) * int(v) for s, v in zip(signs.tolist(), nums.tolist()))
    else:
        total = int(np.dot(signs.astype(np.int64), nums))
    return Fraction(total, 1 << c.exponent)


def product_shape(rs: Sequence[tuple[int, int]]) -> tuple[int, int]:
    return max(r[0] for r in rs), max(r[1] for r in rs)


def _odd_multiplicity(fs: Sequence[RFunction]) -> list[RFunction]:
    by_r: dict[tuple[int, int], list[RFunction]] = {}
    for f in fs:
        by_r.setdefault(f.r, []).append(f)
    out = []
    for r, group in by_r.items():
        if any(not np.array_equal(g.signs, group[0].signs) for g in group):
            raise HypothesisError(f"different r-functions share the parameter {r}")
        if len(group) % 2:
            out.append(group[0])
    return out


def product_r(fs: Sequence[RFunction]) -> RFunction:
    """The product of r-functions of a common index, as an r-function.

    Factors repeated an even number of times cancel (``f^2 = 1``).  The result
    has parameter ``(max r1, max r2)`` over the remaining factors; its signs are
    read off the pointwise product and the whole expansion is verified on the
    grid that resolves every factor.
    """
    if not fs:
        raise HypothesisError("empty product")
    if len({f.index for f in fs}) != 1:
        raise HypothesisError("all factors must share the same index")
    odd = _odd_multiplicity(fs)
    if not odd:
        raise HypothesisError("no parameter occurs an odd number of times")
    if len(odd) == 1:
        return odd[0]
    s1, s2 = product_shape([f.r for f in odd])
    mx, my = s1 + 1, s2 + 1
    prod = np.ones((1 << mx, 1 << my), dtype=np.int8)
    for f in odd:
        prod *= f.values(mx, my)
    # h_R = +1 on the upper-right quarter of R
    signs = prod[1::2, 1::2]
    result = RFunction((s1, s2), signs)
    if not np.array_equal(result.values(mx, my), prod):
        raise HypothesisError("product is not an r-function")
    return result


def rfunction_shape(values: np.ndarray) -> tuple[int, int] | None:
    """Detect the parameter of an r-function given by its grid values, else ``None``."""
    v = np.asarray(values)
    mx = int(np.log2(v.shape[0]))
    my = int(np.log2(v.shape[1]))
    if not np.all(np.abs(v) == 1):
        return None

    def resolution(arr: np.ndarray, m: int) -> int:
        for L in range(m + 1):
            blocks = arr.reshape(1 << L, 1 << (m - L), -1)
            if np.all(blocks == blocks[:, :1, :]):
                return L
        return m + 1

    Lx = resolution(v, mx)
    Ly = resolution(v.T, my)
    if Lx == 0 or Ly == 0 or Lx > mx or Ly > my:
        return None
    s1, s2 = Lx - 1, Ly - 1
    normalised = v * haar_pattern(s1, mx)[:, None] * haar_pattern(s2, my)[None, :]
    blocks = normalised.reshape(1 << s1, 1 << (mx - s1), 1 << s2, 1 << (my - s2))
    if not np.all(blocks == blocks[:, :1, :, :1]):
        return None
    return s1, s2


def random_r_function(r: tuple[int, int], rng: np.random.Generator) -> RFunction:
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=(1 << r[0], 1 << r[1]))
    return RFunction(r, signs)


@lru_cache(maxsize=64)
def _subset_shapes(n: int, v: int, seed: int) -> tuple[tuple[int, int] | None, ...]:
    rng = np.random.default_rng(seed)
    H = hyperbolic_vectors(n)
    grid = n + 1
    vals = [random_r_function(r, rng).values(grid, grid) for r in H]
    shapes = []
    for combo in itertools.combinations(range(len(H)), v):
        prod = np.ones_like(vals[0])
        for c in combo:
            prod = prod * vals[c]
        shapes.append(rfunction_shape(prod))
    return tuple(shapes)


def count_products(n: int, s: tuple[int, int], v: int, seed: int = 0) -> int:
    """Number of ``v``-subsets of ``H_n`` whose product of r-functions has parameter ``s``.

    Each product is formed pointwise from randomly signed r-functions and its
    parameter is read off the resulting grid function.
    """
    s1, s2 = s
    if not (2 <= v <= n and 0 <= s1 <= n and 0 <= s2 <= n and s1 + s2 >= n + v - 1):
        raise RangeError(f"inadmissible (n={n}, s={s}, v={v})")
    return sum(1 for shape in _subset_shapes(n, v, seed) if shape == (s1, s2))


def count_products_formula(n: int, s: tuple[int, int], v: int) -> int:
    return comb(s[0] + s[1] - n - 1, v - 2)


# -- energies ------------------------------------------------------------------

def shape_energy(ps: PointSet, k: int, l: int) -> Fraction:
    """``sum_{R of shape (k,l)} <D, h_R>^2 / |R|``."""
    c = shape_coeffs(ps, k, l)
    return Fraction(c.sum_squares_num() << (k + l), 1 << (2 * c.exponent))


def semi_energy(ps: PointSet, level: int, axis: int = 0) -> Fraction:
    c = semi_coeffs(ps, level, axis)
    return Fraction(c.sum_squares_num() << level, 1 << (2 * c.exponent))


def parseval_partial_sums(ps: PointSet, depths: Iterable[int]) -> list[Fraction]:
    """``mean^2`` plus all normalised squared coefficients up to each depth.

    Depth ``d`` includes ``h^{0,0}_R`` with ``|R| >= 2**-d`` and the one-variable
    families ``h^{0,1}``, ``h^{1,0}`` down to level ``d``.
    """
    depths = sorted(depths)
    out = []
    total = exact_mean(ps) ** 2
    done = -1
    for d in depths:
        for m in range(done + 1, d + 1):
            for k, l in shapes_with_volume(m):
                total += shape_energy(ps, k, l)
            total += semi_energy(ps, m, 0) + semi_energy(ps, m, 1)
        done = d
        out.append(total)
    return out


def haar_values(R: DyadicRectangle, mx: int, my: int, t: HaarType = (0, 0)) -> np.ndarray:
    """``h_R^t`` on the ``2**mx x 2**my`` grid of cells (``mx > k``, ``my > l`` for Haar factors)."""
    def one(level: int, index: int, eps: int, m: int) -> np.ndarray:
        idx = np.arange(1 << m)
        inside = (idx >> (m - level)) == index
        if eps:
            return inside.astype(np.int8)
        return np.where(inside, haar_pattern(level, m), 0).astype(np.int8)

    return (one(R.rx.level, R.rx.index, t[0], mx)[:, None]
            * one(R.ry.level, R.ry.index, t[1], my)[None, :])
