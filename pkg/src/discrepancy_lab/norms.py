"""Norms of the discrepancy function: L-infinity, L^p, Orlicz and square functions.

All integrations that feed a norm are exact where the method tag says
``exact``: the per-cell integrand ``(count - N x y)^p`` is a polynomial and is
integrated in closed form with integer arithmetic.  Only the final ``p``-th
root, exponentials and the Orlicz bisection run in floating point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .discrepancy import CellGrid, work_budget
from .dyadic import render
from .errors import BudgetError, ConvergenceError, DomainError
from .pointset import PointSet

DEFAULT_PGRID = (2, 4, 8, 16, 32, 64)

#: Default cap on swept cells; a 2^13-point set has (2^13 + 1)^2 cells.
CELL_BUDGET = 1 << 27

#: Largest even ``p`` integrated with exact integers by the automatic method.
EXACT_P_LIMIT = 8


# -- L-infinity ----------------------------------------------------------------

def _check_cells(grid: CellGrid, budget: int | None) -> None:
    limit = budget if budget is not None else work_budget(CELL_BUDGET)
    if grid.n_cells > limit:
        raise BudgetError(f"{grid.n_cells} cells exceed the work budget {limit}")


def linf_norm(ps: PointSet | CellGrid, budget: int | None = None) -> Fraction:
    """Exact essential supremum of ``|D|``.

    On an open cell ``D = count - N x y`` is monotone in each variable, so the
    supremum of ``D`` sits at the lower-left corner and the infimum at the
    upper-right corner.  Accepts a prepared :class:`CellGrid`, including one
    with non-dyadic coordinates.
    """
    grid = ps if isinstance(ps, CellGrid) else CellGrid(ps)
    if grid.N == 0:
        return Fraction(0)
    _check_cells(grid, budget)
    N = grid.N
    one = grid.qx * grid.qy
    if one.bit_length() + N.bit_length() + 1 >= 62:
        return _linf_big(grid)
    xb, yb = grid.xb, grid.yb
    ylo, yhi = yb[:-1], yb[1:]
    best = 0
    for i, cnt in grid.columns():
        above = int(np.max(cnt * one - N * int(xb[i]) * ylo))
        below = int(np.max(N * int(xb[i + 1]) * yhi - cnt * one))
        best = max(best, above, below)
    return Fraction(best, one)


def _linf_big(grid: CellGrid) -> Fraction:
    N = grid.N
    one = grid.qx * grid.qy
    xb = [int(v) for v in grid.xb.tolist()]
    yb = [int(v) for v in grid.yb.tolist()]
    best = 0
    for i, cnt in grid.columns():
        for j, c in enumerate(cnt.tolist()):
            best = max(best, c * one - N * xb[i] * yb[j], N * xb[i + 1] * yb[j + 1] - c * one)
    return Fraction(best, one)


def linf_sampled(ps: PointSet, count: int, seed: int = 0) -> Fraction:
    """Lower bound for ``||D||_inf`` from seeded random evaluation points near cell corners."""
    rng = np.random.default_rng(seed)
    s = ps.scale
    xs, ys = ps.xs, ps.ys
    best = Fraction(0)
    bx = rng.choice(np.concatenate([xs, [1 << s]]), size=count)
    by = rng.choice(np.concatenate([ys, [1 << s]]), size=count)
    for X, Y in zip(bx.tolist(), by.tolist()):
        # just above the corner (closed-box count) and just below it (open-box count)
        closed = int(np.count_nonzero((xs <= X) & (ys <= Y)))
        opened = int(np.count_nonzero((xs < X) & (ys < Y)))
        area = Fraction(ps.N * X * Y, 1 << (2 * s))
        best = max(best, closed - area, area - opened)
    return best


# -- L^p -------------------------------------------------------------------------

@dataclass(frozen=True)
class LpValue:
    p: float
    value: float
    method: str
    error: float = 0.0
    power: Fraction | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        out = {"p": self.p, "value": float(self.value), "method": self.method, "error": self.error}
        if self.power is not None:
            out["power"] = render(self.power)
        if self.detail:
            out["detail"] = self.detail
        return out


def lp_power_exact(ps: PointSet, p: int, budget: int | None = None) -> Fraction:
    """Exact ``int |D|^p`` for even ``p``.

    With ``DX_k[i] = X_{i+1}^k - X_i^k`` (numerators over ``2**s``) the cell
    integrals collapse to ``sum_k C(p,k) (-N)^k / ((k+1)^2 2^{2s(k+1)}) T_k``
    where ``T_k = sum_i DX_{k+1}[i] sum_j count[i,j]^{p-k} DY_{k+1}[j]``.
    """
    if p <= 0 or p % 2:
        raise DomainError(f"exact integration needs an even positive p, got {p}")
    N = ps.N
    if N == 0:
        return Fraction(0)
    grid = CellGrid(ps)
    _check_cells(grid, budget)
    s = grid.scale
    xb = [int(v) for v in grid.xb.tolist()]
    yb = np.array([int(v) for v in grid.yb.tolist()], dtype=object)
    T = [0] * (p + 1)
    small = []
    dys = []
    for k in range(p + 1):
        fits = (p - k) * N.bit_length() + s * (k + 1) < 62 and s * (k + 1) < 62
        small.append(fits)
        dy = yb[1:] ** (k + 1) - yb[:-1] ** (k + 1)
        dys.append(dy.astype(np.int64) if fits else dy)
    for i, cnt in grid.columns():
        c_obj = None
        for k in range(p + 1):
            e = p - k
            if small[k]:
                col = int(np.dot(cnt ** e, dys[k]))
            else:
                if c_obj is None:
                    c_obj = cnt.astype(object)
                col = int(np.dot(c_obj ** e, dys[k]))
            if col:
                T[k] += (xb[i + 1] ** (k + 1) - xb[i] ** (k + 1)) * col
    total = Fraction(0)
    for k in range(p + 1):
        total += Fraction(comb(p, k) * (-N) ** k * T[k], (k + 1) ** 2 << (2 * s * (k + 1)))
    return total


def _column_chunks(grid: CellGrid, width: int):
    ncols, nrows = grid.shape
    buf = np.empty((width, nrows), dtype=np.int64)
    start = 0
    fill = 0
    for i, cnt in grid.columns():
        buf[fill] = cnt
        fill += 1
        if fill == width or i == ncols - 1:
            yield start, buf[:fill]
            start += fill
            fill = 0


def _lp_power_gauss(ps: PointSet, p: int, scale_by: float, budget: int | None) -> float:
    """``int |D / scale_by|^p`` for even ``p`` by Gauss-Legendre in ``x``, closed form in ``y``.

    After the ``y`` integration the integrand is a polynomial of degree ``p``
    in ``x``, so ``p/2 + 1`` nodes per column are exact up to rounding.
    """
    grid = CellGrid(ps)
    _check_cells(grid, budget)
    N = grid.N
    one = float(1 << grid.scale)
    xb = grid.xb.astype(float) / one
    yb = grid.yb.astype(float) / one
    c, d = yb[:-1], yb[1:]
    t, w = np.polynomial.legendre.leggauss(p // 2 + 1)
    nrows = len(c)
    width = max(1, (1 << 21) // (len(t) * nrows))
    total = 0.0
    L = scale_by
    for start, cnts in _column_chunks(grid, width):
        a = xb[start:start + len(cnts)]
        b = xb[start + 1:start + 1 + len(cnts)]
        nodes = (a[:, None] + b[:, None]) / 2 + (b - a)[:, None] / 2 * t[None, :]
        weights = (b - a)[:, None] / 2 * w[None, :]
        cnt = cnts[:, None, :].astype(float)
        xN = N * nodes[:, :, None]
        u = (cnt - xN * c[None, None, :]) / L
        v = (cnt - xN * d[None, None, :]) / L
        G = _power_ratio(u, v, xN * (d - c)[None, None, :] / L, p)
        inner = (d - c)[None, None, :] * G / (p + 1)
        total += float(np.sum(weights * inner.sum(axis=2)))
    return total


def _power_ratio(u: np.ndarray, v: np.ndarray, delta: np.ndarray, p: int) -> np.ndarray:
    """``(u^{p+1} - v^{p+1}) / (u - v)`` for even ``p``, evaluated without cancellation."""
    au, av = np.abs(u), np.abs(v)
    big = np.maximum(au, av)
    same = (u * v) > 0
    out = np.empty_like(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        tt = np.where(big > 0, delta / np.where(big > 0, big, 1.0), 0.0)
        tt = np.clip(tt, 0.0, 1.0)
        geo = np.where(tt > 0, -np.expm1((p + 1) * np.log1p(-tt)) / np.where(tt > 0, tt, 1.0), p + 1.0)
        out_same = big ** p * geo
        den = au + av
        out_opp = np.where(den > 0, (au ** (p + 1) + av ** (p + 1)) / np.where(den > 0, den, 1.0), 0.0)
    out[...] = np.where(same, out_same, out_opp)
    return out


def _midpoint_power(ps: PointSet, p: float, r: int) -> float:
    """Midpoint rule for ``int |D|^p`` on an ``r x r`` refinement of every cell."""
    grid = CellGrid(ps)
    one = float(1 << grid.scale)
    xb = grid.xb.astype(float) / one
    yb = grid.yb.astype(float) / one
    counts = grid.counts.astype(float)
    frac = (np.arange(r) + 0.5) / r
    total = 0.0
    dy = np.diff(yb)
    for i in range(len(xb) - 1):
        a, b = xb[i], xb[i + 1]
        xm = a + (b - a) * frac
        ym = yb[:-1, None] + dy[:, None] * frac[None, :]
        vals = counts[i][:, None, None] - ps.N * xm[None, :, None] * ym[:, None, :]
        total += float(np.sum(np.abs(vals) ** p * (dy[:, None, None] / r))) * (b - a) / r
    return total


def lp_norm(ps: PointSet, p: float, method: str = "auto", budget: int | None = None) -> LpValue:
    """``||D||_p`` with a method tag.

    ``exact`` integrates cellwise in integers (even ``p``); ``gauss`` is the
    closed-form-in-``y`` Gauss rule, exact up to float rounding (even ``p``);
    ``quadrature`` is the midpoint rule on 2x2 and 4x4 refinements with a
    Richardson error estimate.  ``auto`` picks ``exact`` for even
    ``p <= EXACT_P_LIMIT``, ``gauss`` for larger even ``p`` and ``quadrature``
    otherwise.
    """
    if p < 1:
        raise DomainError(f"p must be at least 1, got {p}")
    even = float(p).is_integer() and int(p) % 2 == 0
    if method == "auto":
        method = ("exact" if int(p) <= EXACT_P_LIMIT else "gauss") if even else "quadrature"
    if ps.N == 0:
        return LpValue(p, 0.0, method, 0.0, Fraction(0) if method == "exact" else None)
    if method in ("exact", "gauss") and not even:
        raise DomainError(f"method {method!r} needs an even integer p, got {p}")
    if method == "exact":
        power = lp_power_exact(ps, int(p), budget)
        return LpValue(p, _root(power, int(p)), "exact", 0.0, power)
    if method == "gauss":
        L = float(linf_norm(ps, budget)) or 1.0
        power = _lp_power_gauss(ps, int(p), L, budget)
        return LpValue(p, L * power ** (1.0 / p), "gauss", 0.0,
                       detail=f"{int(p) // 2 + 1} Gauss nodes per column")
    if method == "quadrature":
        grid = CellGrid(ps)
        _check_cells(grid, None if budget is None else budget // 16)
        i2 = _midpoint_power(ps, p, 2)
        i4 = _midpoint_power(ps, p, 4)
        extrap = i4 + (i4 - i2) / 3
        err = abs(i4 - i2) / 3
        value = max(extrap, 0.0) ** (1.0 / p)
        # error of the root from the error of the power
        root_err = err / (p * value ** (p - 1)) if value > 0 else err ** (1.0 / p)
        return LpValue(p, value, "quadrature", root_err, detail="midpoint 2x2/4x4, Richardson")
    raise DomainError(f"unknown method {method!r}")


def _root(power: Fraction, p: int) -> float:
    if power <= 0:
        return 0.0
    # log-space root keeps huge powers finite
    lg = math.log(power.numerator) - math.log(power.denominator)
    return math.exp(lg / p)


# -- Orlicz norms ---------------------------------------------------------------

@dataclass(frozen=True)
class OrliczSpec:
    """Young function: ``exp`` is ``e^{|x|^alpha} - 1``, ``llog`` is ``|x| log(3+|x|)^{1/alpha}``.

    For ``exp`` with ``alpha < 1`` the function is replaced below the point
    ``x_alpha`` where the tangent through the origin touches it by that
    tangent, which makes it convex.
    """

    alpha: float
    family: str = "exp"

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")
        if self.family not in ("exp", "llog"):
            raise DomainError(f"unknown Young function family {self.family!r}")

    @property
    def threshold(self) -> float:
        """``x_alpha``; zero when no convexification is needed."""
        if self.family != "exp" or self.alpha >= 1:
            return 0.0
        return _tangent_point(self.alpha)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=float))
        a = self.alpha
        if self.family == "llog":
            return x * np.log(3.0 + x) ** (1.0 / a)
        with np.errstate(over="ignore"):
            out = np.expm1(x ** a)
        xa = self.threshold
        if xa > 0:
            slope = math.expm1(xa ** a) / xa
            out = np.where(x < xa, slope * x, out)
        return out

    def inverse_at_one(self) -> float:
        """``psi^{-1}(1)``."""
        if self.family == "exp":
            xa = self.threshold
            if xa > 0 and math.expm1(xa ** self.alpha) >= 1:
                return xa / math.expm1(xa ** self.alpha)
            return math.log(2.0) ** (1.0 / self.alpha)
        return brentq(lambda x: x * math.log(3.0 + x) ** (1.0 / self.alpha) - 1.0, 1e-12, 1.0)


def _tangent_point(alpha: float) -> float:
    """Solve ``alpha u e^u = e^u - 1`` for ``u = x^alpha > 0``; return ``x``."""
    u = brentq(lambda u: alpha * u * math.exp(u) - math.expm1(u), 1e-9, 1.0 / alpha + 50.0)
    return u ** (1.0 / alpha)


@dataclass(frozen=True)
class OrliczValue:
    value: float
    lower: float
    upper: float
    alpha: float
    family: str
    error: float = 0.0

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_dict(self) -> dict:
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "alpha": self.alpha, "family": self.family, "quadrature_error": self.error}


def orlicz_norm(values: Sequence[float], weights: Sequence[float], spec: OrliczSpec,
                rtol: float = 1e-9, max_iter: int = 400) -> OrliczValue:
    """Luxemburg norm ``inf{K > 0 : sum w psi(f/K) <= 1}`` of a discrete distribution.

    Geometric bisection on ``K`` until the bracket is ``rtol`` relative.
    """
    f = np.abs(np.asarray(values, dtype=float))
    w = np.asarray(weights, dtype=float)
    keep = (w > 0) & (f > 0)
    f, w = f[keep], w[keep]
    if len(f) == 0:
        return OrliczValue(0.0, 0.0, 0.0, spec.alpha, spec.family)
    inv = spec.inverse_at_one()

    def excess(K: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.sum(w * spec(f / K))) - 1.0

    hi = float(np.max(f)) / inv * max(1.0, float(np.sum(w))) * 1.0000001
    lo = float(np.sum(w * f)) / inv / 2
    while excess(hi) > 0:
        hi *= 2
    while lo > 0 and excess(lo) <= 0:
        lo /= 2
    for _ in range(max_iter):
        if hi - lo <= rtol * hi:
            return OrliczValue(hi, lo, hi, spec.alpha, spec.family)
        mid = math.sqrt(lo * hi) if lo > 0 else hi / 2
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(f"Orlicz bisection did not reach rtol={rtol} in {max_iter} steps")


def indicator_llog_norm(g: int, alpha: float, scale: float = 1.0) -> OrliczValue:
    """``L(log L)^{1/alpha}`` norm of ``scale * 1_E`` with ``P(E) = 2**-g``."""
    return orlicz_norm([scale], [2.0 ** -g], OrliczSpec(alpha, "llog"))


def indicator_reference(g: int, alpha: float) -> float:
    """``P(E) (1 - log P(E))^{1/alpha}`` for ``P(E) = 2**-g``."""
    P = 2.0 ** -g
    return P * (1.0 - math.log(P)) ** (1.0 / alpha)


def discrepancy_samples(ps: PointSet, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Values of ``D`` at tensor Gauss nodes of every cell, with weights."""
    grid = CellGrid(ps)
    _check_cells(grid, work_budget() // (q * q))
    one = float(1 << grid.scale)
    xb = grid.xb.astype(float) / one
    yb = grid.yb.astype(float) / one
    t, w = np.polynomial.legendre.leggauss(q)
    xn = ((xb[:-1, None] + xb[1:, None]) / 2 + np.diff(xb)[:, None] / 2 * t).reshape(-1)
    xw = (np.diff(xb)[:, None] / 2 * w).reshape(-1)
    yn = ((yb[:-1, None] + yb[1:, None]) / 2 + np.diff(yb)[:, None] / 2 * t).reshape(-1)
    yw = (np.diff(yb)[:, None] / 2 * w).reshape(-1)
    counts = np.repeat(np.repeat(grid.counts, q, axis=0), q, axis=1).astype(float)
    vals = counts - ps.N * xn[:, None] * yn[None, :]
    return vals.reshape(-1), (xw[:, None] * yw[None, :]).reshape(-1)


def orlicz_norm_discrepancy(ps: PointSet, spec: OrliczSpec, q: int = 6) -> OrliczValue:
    """``||D||`` in the Orlicz space of ``spec``; cellwise Gauss rule, error from ``q`` vs ``2q`` nodes."""
    coarse = orlicz_norm(*discrepancy_samples(ps, q), spec)
    fine = orlicz_norm(*discrepancy_samples(ps, 2 * q), spec)
    err = abs(fine.value - coarse.value)
    return OrliczValue(fine.value, fine.lower - err, fine.upper + err, spec.alpha, spec.family, err)


# -- exp(L^alpha) proxy ----------------------------------------------------------

def proxy_from_lp(lp: Mapping[float, float], alpha: float) -> tuple[float, float]:
    """``max_p p^{-1/alpha} ||f||_p`` over the supplied norms; returns (value, argmax p)."""
    best, arg = 0.0, None
    for p, v in sorted(lp.items()):
        val = p ** (-1.0 / alpha) * v
        if arg is None or val > best:
            best, arg = val, p
    return best, arg


def exp_proxy(ps: PointSet, alpha: float, pgrid: Iterable[float] = DEFAULT_PGRID,
              budget: int | None = None) -> float:
    lp = {p: lp_norm(ps, p, budget=budget).value for p in pgrid}
    return proxy_from_lp(lp, alpha)[0]


# -- Haar expansions and square functions ----------------------------------------

@dataclass
class HaarExpansion:
    """A finite ``sum c_R h_R`` stored per shape as ``(2**k, 2**l)`` coefficient arrays."""

    terms: dict = field(default_factory=dict)

    @classmethod
    def single(cls, k: int, i: int, l: int, j: int, coeff=1) -> "HaarExpansion":
        arr = np.zeros((1 << k, 1 << l), dtype=type(coeff) if isinstance(coeff, float) else np.int64)
        arr[i, j] = coeff
        return cls({(k, l): arr})

    @classmethod
    def from_rfunctions(cls, fs) -> "HaarExpansion":
        out = cls()
        for f in fs:
            out.add(f.r, f.signs.astype(np.int64))
        return out

    def add(self, shape: tuple[int, int], coeffs: np.ndarray) -> None:
        if shape in self.terms:
            self.terms[shape] = self.terms[shape] + coeffs
        else:
            self.terms[shape] = np.asarray(coeffs)

    @property
    def resolution(self) -> tuple[int, int]:
        """Grid exponents fine enough to resolve every term."""
        if not self.terms:
            return 0, 0
        return (max(k for k, _ in self.terms) + 1, max(l for _, l in self.terms) + 1)

    def values(self, mx: int | None = None, my: int | None = None) -> np.ndarray:
        from .haar import haar_pattern

        rx, ry = self.resolution
        mx = rx if mx is None else mx
        my = ry if my is None else my
        out = np.zeros((1 << mx, 1 << my), dtype=float)
        for (k, l), c in self.terms.items():
            up = np.repeat(np.repeat(c.astype(float), 1 << (mx - k), axis=0), 1 << (my - l), axis=1)
            out += up * haar_pattern(k, mx)[:, None] * haar_pattern(l, my)[None, :]
        return out

    def square_function_squared(self, mx: int | None = None, my: int | None = None) -> np.ndarray:
        """``S(f)^2 = sum c_R^2 / |R|^2 * 1_R``, normalised so a single ``h_R`` gives ``1_R``.

        With L-infinity normalised Haar functions ``<f, h_R> = c_R |R|``, so the
        summand is ``c_R^2 1_R``.  Integer coefficients give an exact integer array.
        """
        rx, ry = self.resolution
        mx = max(rx - 1, 0) if mx is None else mx
        my = max(ry - 1, 0) if my is None else my
        exact = all(np.issubdtype(c.dtype, np.integer) or c.dtype == object for c in self.terms.values())
        out = np.zeros((1 << mx, 1 << my), dtype=object if exact else float)
        for (k, l), c in self.terms.items():
            sq = c.astype(object) ** 2 if exact else c.astype(float) ** 2
            out += np.repeat(np.repeat(sq, 1 << (mx - k), axis=0), 1 << (my - l), axis=1)
        return out


def square_function(expansion: HaarExpansion, x: Sequence[float]) -> float:
    total = 0.0
    for (k, l), c in expansion.terms.items():
        i = min(int(x[0] * (1 << k)), (1 << k) - 1)
        j = min(int(x[1] * (1 << l)), (1 << l) - 1)
        total += float(c[i, j]) ** 2
    return math.sqrt(total)


def sup_square_function(expansion: HaarExpansion):
    """``sup S(f)^2`` (exact for integer coefficients)."""
    if not expansion.terms:
        return 0
    sq = expansion.square_function_squared()
    m = sq.max()
    return int(m) if sq.dtype == object else float(m)


@dataclass(frozen=True)
class CwwReport:
    ratios: dict
    sup_square: float

    @property
    def max_ratio(self) -> float:
        return max(self.ratios.values()) if self.ratios else 0.0


def cww_check(expansion: HaarExpansion, pgrid: Iterable[float] = DEFAULT_PGRID) -> CwwReport:
    """``||f||_p / (sqrt(p) ||S(f)||_inf)`` for each ``p``."""
    vals = np.abs(expansion.values())
    s = math.sqrt(float(sup_square_function(expansion)))
    ratios = {}
    for p in pgrid:
        norm = float(np.mean(vals ** p)) ** (1.0 / p) if vals.size else 0.0
        ratios[p] = norm / (math.sqrt(p) * s) if s > 0 else 0.0
    return CwwReport(ratios, s)


@dataclass(frozen=True)
class InterpolationReport:
    A: float
    alpha: float
    bound: float
    interpolated: float
    proxy: float | None
    precondition_ok: bool

    @property
    def ratio(self) -> float | None:
        return None if self.proxy is None else self.proxy / self.bound


def interpolation_check(exp2: float, linf: float, alpha: float, proxy: float | None = None,
                        A: float | None = None) -> InterpolationReport:
    """Compare a measured exp(L^alpha) size with ``A^{1-1/alpha}``.

    ``interpolated = exp2^{2/alpha} linf^{1-2/alpha}`` is the interpolation
    bound itself; it reduces to ``exp2`` at ``alpha = 2``.
    """
    if A is None:
        A = max(linf, exp2 * exp2)
    ok = exp2 <= math.sqrt(A) * (1 + 1e-12) and linf <= A * (1 + 1e-12)
    interpolated = exp2 ** (2.0 / alpha) * linf ** (1.0 - 2.0 / alpha) if linf > 0 else exp2
    return InterpolationReport(A, alpha, A ** (1.0 - 1.0 / alpha), interpolated, proxy, ok)


# -- reports --------------------------------------------------------------------

@dataclass
class NormReport:
    N: int
    linf: Fraction | None = None
    linf_tag: str = "exact"
    lp: dict = field(default_factory=dict)
    exp_proxy: dict = field(default_factory=dict)
    orlicz: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "linf": None if self.linf is None else {"value": render(self.linf),
                                                    "float": float(self.linf), "tag": self.linf_tag},
            "lp": {str(p): v.as_dict() for p, v in self.lp.items()},
            "exp_proxy": {str(a): {"value": v, "pgrid": list(g)} for a, (v, g) in self.exp_proxy.items()},
            "orlicz": {str(a): v.as_dict() for a, v in self.orlicz.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, default=_json_float)


def _json_float(o):
    if isinstance(o, (np.floating, float)):
        return float(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def norm_report(ps: PointSet, pgrid: Iterable[float] = DEFAULT_PGRID,
                alphas: Iterable[float] = (2.0,), orlicz: bool = False,
                budget: int | None = None, samples: int = 100_000, seed: int = 0) -> NormReport:
    """Full norm profile; falls back to a sampled L-infinity lower bound over budget."""
    pgrid = tuple(pgrid)
    rep = NormReport(ps.N)
    try:
        rep.linf = linf_norm(ps, budget)
    except BudgetError:
        rep.linf = linf_sampled(ps, samples, seed)
        rep.linf_tag = "lower bound only (sampled)"
        return rep
    for p in pgrid:
        rep.lp[p] = lp_norm(ps, p, budget=budget)
    values = {p: v.value for p, v in rep.lp.items()}
    for a in alphas:
        rep.exp_proxy[a] = (proxy_from_lp(values, a)[0], pgrid)
        if orlicz:
            rep.orlicz[a] = orlicz_norm_discrepancy(ps, OrliczSpec(a))
    return rep
