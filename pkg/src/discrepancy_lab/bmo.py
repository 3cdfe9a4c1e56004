"""Dyadic product BMO and one-parameter BMO square sums of the discrepancy function.

For a set ``U`` that is a union of dyadic cells of side ``2**-mU`` the square
sum is

    |U|^{-1} sum_{R subset U, |R| >= 2^-m} <f, h_R>^2 / |R|.

Only the ``h^{0,0}`` coefficients enter: functions that are constant in one
variable are orthogonal to every ``h_R``.  Coefficients are taken from the
sparse per-shape tables of :mod:`discrepancy_lab.haar`, so a rectangle without
points costs nothing beyond a count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .discrepancy import box_integral
from .dyadic import Dyadic, render
from .errors import DomainError
from .haar import LevelCoeffs, semi_coeffs, shape_coeffs, shapes_up_to
from .norms import HaarExpansion
from .pointset import PointSet

#: Default resolution of candidate sets: 2^12 cells.
DEFAULT_MU = 6

FAMILIES = ("global", "squares", "rectangles", "greedy")


def _expansion_levels(expansion: HaarExpansion) -> Callable[[int, int], LevelCoeffs | None]:
    # <f, h_R> = c_R |R| for f = sum c_R h_R with integer c_R
    def level(k: int, l: int) -> LevelCoeffs | None:
        c = expansion.terms.get((k, l))
        if c is None:
            return None
        flat = np.asarray(c).reshape(-1)
        keys = np.flatnonzero(flat)
        nums = flat[keys].astype(np.int64)
        return LevelCoeffs(1 << (k + l), keys, nums, 0, k + l, 0, (k, l))

    return level


def coefficient_levels(source) -> Callable[[int, int], LevelCoeffs | None]:
    if isinstance(source, PointSet):
        return lambda k, l: shape_coeffs(source, k, l)
    if isinstance(source, HaarExpansion):
        return _expansion_levels(source)
    raise TypeError(f"cannot take Haar coefficients of {type(source).__name__}")


def _pool_and(mask: np.ndarray, a: int, b: int) -> np.ndarray:
    """AND-reduce a ``(2**mU, 2**mU)`` mask onto ``(2**a, 2**b)`` blocks."""
    mu = int(np.log2(mask.shape[0]))
    return mask.reshape(1 << a, 1 << (mu - a), 1 << b, 1 << (mu - b)).all(axis=(1, 3))


def _check_mask(U: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=bool)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] & (U.shape[0] - 1):
        raise DomainError("U must be a square boolean mask with a power-of-two side")
    if not U.any():
        raise DomainError("U is empty")
    return U


def _inside(c: LevelCoeffs, k: int, l: int, U: np.ndarray) -> tuple[int, np.ndarray]:
    """Number of shape-``(k, l)`` rectangles inside ``U`` and a flag per occupied entry."""
    mu = int(np.log2(U.shape[0]))
    kp, lp = min(k, mu), min(l, mu)
    pooled = _pool_and(U, kp, lp)
    n_inside = int(pooled.sum()) << ((k - kp) + (l - lp))
    keys = c.keys
    parent = ((keys >> l) >> (k - kp)) * (1 << lp) + ((keys & ((1 << l) - 1)) >> (l - lp))
    return n_inside, pooled.reshape(-1)[parent] if len(keys) else np.zeros(0, dtype=bool)


def square_sum_over(source, U: np.ndarray, depth: int) -> Fraction:
    """Exact ``|U|^{-1} sum_{R subset U, |R| >= 2^-depth} <f, h_R>^2 / |R|``."""
    U = _check_mask(U)
    levels = coefficient_levels(source)
    total = Fraction(0)
    for k, l in shapes_up_to(depth):
        c = levels(k, l)
        if c is None:
            continue
        n_inside, hit = _inside(c, k, l, U)
        if n_inside == 0:
            continue
        occ = [int(v) for v in c.nums[hit].tolist()]
        sq = sum(v * v for v in occ) + (n_inside - len(occ)) * c.empty_num * c.empty_num
        total += Fraction(sq << (k + l), 1 << (2 * c.exponent))
    mu = int(np.log2(U.shape[0]))
    return total * Fraction(1 << (2 * mu), int(U.sum()))


def global_square_sum(source, depth: int) -> Fraction:
    return square_sum_over(source, np.ones((1, 1), dtype=bool), depth)


# -- candidate families -------------------------------------------------------

class _BlockEnergies:
    """Float energies of all rectangles grouped by the block of cells they pool to.

    A rectangle of shape ``(k, l)`` pools to the block shape
    ``(min(k, mU), min(l, mU))``; it lies inside ``U`` exactly when every cell
    of its block does.
    """

    def __init__(self, source, depth: int, mu: int):
        self.mu = mu
        levels = coefficient_levels(source)
        self.blocks: dict[tuple[int, int], np.ndarray] = {}
        for k, l in shapes_up_to(depth):
            c = levels(k, l)
            if c is None:
                continue
            kp, lp = min(k, mu), min(l, mu)
            scale = 2.0 ** (k + l - 2 * c.exponent)
            per_block = 1 << ((k - kp) + (l - lp))
            nb = 1 << (kp + lp)
            e = np.full(nb, float(c.empty_num) ** 2 * scale * per_block)
            if len(c.keys):
                keys = c.keys
                parent = ((keys >> l) >> (k - kp)) * (1 << lp) + ((keys & ((1 << l) - 1)) >> (l - lp))
                occ_e = c.nums.astype(float) ** 2 * scale
                e += np.bincount(parent, weights=occ_e - float(c.empty_num) ** 2 * scale, minlength=nb)
            acc = self.blocks.setdefault((kp, lp), np.zeros((1 << kp, 1 << lp)))
            acc += e.reshape(1 << kp, 1 << lp)

    def rectangle_values(self, shapes) -> list[tuple[float, int, int, int, int]]:
        """Float square sum of every dyadic rectangle ``Q`` of the given shapes."""
        out = []
        for a, b in shapes:
            tot = np.zeros((1 << a, 1 << b))
            for (kp, lp), e in self.blocks.items():
                if kp < a or lp < b:
                    continue
                tot += e.reshape(1 << a, 1 << (kp - a), 1 << b, 1 << (lp - b)).sum(axis=(1, 3))
            vals = tot * float(1 << (a + b))
            i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
            out.append((float(vals[i, j]), a, int(i), b, int(j)))
        return out

    def greedy(self, budget: int) -> tuple[np.ndarray, float]:
        """Grow ``U`` cell by cell by largest energy gain; return the best prefix mask."""
        mu = self.mu
        side = 1 << mu
        missing = {s: np.full((1 << s[0], 1 << s[1]), 1 << ((mu - s[0]) + (mu - s[1])))
                   for s in self.blocks}
        U = np.zeros((side, side), dtype=bool)
        energy = 0.0
        best_val, best_size = -1.0, 0
        order = []
        steps = min(budget, side * side)
        for step in range(steps):
            gain = np.zeros((side, side))
            for s, e in self.blocks.items():
                ready = np.where(missing[s] == 1, e, 0.0)
                gain += np.repeat(np.repeat(ready, 1 << (mu - s[0]), axis=0), 1 << (mu - s[1]), axis=1)
            gain[U] = -np.inf
            flat = int(np.argmax(gain))
            ci, cj = divmod(flat, side)
            U[ci, cj] = True
            energy += gain[ci, cj]
            order.append(flat)
            for s in self.blocks:
                missing[s][ci >> (mu - s[0]), cj >> (mu - s[1])] -= 1
            val = energy * side * side / (step + 1)
            if val > best_val:
                best_val, best_size = val, step + 1
        mask = np.zeros(side * side, dtype=bool)
        mask[order[:best_size]] = True
        return mask.reshape(side, side), best_val


@dataclass
class BmoReport:
    global_sum: Fraction
    estimate: Fraction
    best_U: np.ndarray
    family: str
    depth: int
    mu: int
    description: str
    per_family: dict

    def as_dict(self, bitmap: bool = False) -> dict:
        out = {
            "global_sum": render(self.global_sum),
            "global_sum_float": float(self.global_sum),
            "estimate": render(self.estimate),
            "estimate_float": float(self.estimate),
            "family": self.family,
            "depth": self.depth,
            "mu": self.mu,
            "best_U": self.description,
            "per_family": {k: {"value": render(v), "float": float(v)} for k, v in self.per_family.items()},
        }
        if bitmap:
            out["bitmap"] = ["".join("1" if b else "0" for b in row) for row in self.best_U]
        return out

    def to_json(self, bitmap: bool = False) -> str:
        return json.dumps(self.as_dict(bitmap), indent=2)


def _rect_mask(mu: int, a: int, i: int, b: int, j: int) -> np.ndarray:
    U = np.zeros((1 << mu, 1 << mu), dtype=bool)
    sx, sy = 1 << (mu - a), 1 << (mu - b)
    U[i * sx:(i + 1) * sx, j * sy:(j + 1) * sy] = True
    return U


def bmo_estimate(source, families=("global", "squares", "rectangles", "greedy"), depth: int = 8,
                 mu: int = DEFAULT_MU, greedy_budget: int = 1 << 12) -> BmoReport:
    """Supremum of the square sum over candidate sets ``U``.

    Candidates are searched with float energies; the winner of each family is
    then recomputed exactly, and the estimate is the largest exact value.
    """
    families = tuple(families)
    for f in families:
        if f not in FAMILIES:
            raise DomainError(f"unknown candidate family {f!r}")
    glob = global_square_sum(source, depth)
    per_family = {"global": glob}
    masks = {"global": (np.ones((1 << mu, 1 << mu), dtype=bool), "[0,1]^2")}
    blocks = _BlockEnergies(source, depth, mu) if set(families) - {"global"} else None
    for fam in families:
        if fam in ("squares", "rectangles"):
            shapes = ([(a, a) for a in range(mu + 1)] if fam == "squares"
                      else [(a, b) for a in range(mu + 1) for b in range(mu + 1)])
            val, a, i, b, j = max(blocks.rectangle_values(shapes))
            U = _rect_mask(mu, a, i, b, j)
            per_family[fam] = square_sum_over(source, U, depth)
            masks[fam] = (U, f"rectangle k={a} i={i} l={b} j={j}")
        elif fam == "greedy":
            U, _ = blocks.greedy(greedy_budget)
            per_family[fam] = square_sum_over(source, U, depth)
            masks[fam] = (U, f"greedy union of {int(U.sum())} cells")
    best = max(per_family, key=lambda f: (per_family[f], -FAMILIES.index(f)))
    U, desc = masks[best]
    return BmoReport(glob, per_family[best], U, best, depth, mu, desc, per_family)


# -- one-parameter BMO ----------------------------------------------------------

def bmo1_norm(source, depth: int, axis: int = 0, max_level: int | None = None) -> Fraction:
    """``sup_J |J|^{-1} sum_{I subset J, |I| >= 2^-depth} <f, h^{0,1}_{I x [0,1]}>^2 / |I|``.

    ``source`` is a point set or a mapping ``{(level, index): coefficient}``.
    ``J`` ranges over dyadic intervals of level at most ``max_level``
    (default ``depth``).
    """
    jmax = depth if max_level is None else min(max_level, depth)
    if isinstance(source, Mapping):
        return _bmo1_from_mapping(source, depth, jmax)
    levels = [semi_coeffs(source, k, axis) for k in range(depth + 1)]
    best = Fraction(0)
    for j in range(jmax + 1):
        base = 0.0
        corr = {}
        for k in range(j, depth + 1):
            c = levels[k]
            scale = 2.0 ** (k - 2 * c.exponent)
            base += float(c.empty_num) ** 2 * scale * (1 << (k - j))
            if len(c.keys):
                parents = c.keys >> (k - j)
                d = c.nums.astype(float) ** 2 * scale - float(c.empty_num) ** 2 * scale
                np.add.at(corr.setdefault(k, np.zeros(1 << j)), parents, d)
        total = np.full(1 << j, base)
        for arr in corr.values():
            total += arr
        J = int(np.argmax(total))
        best = max(best, _bmo1_exact(levels, depth, j, J))
    return best


def _bmo1_exact(levels, depth: int, j: int, J: int) -> Fraction:
    total = Fraction(0)
    for k in range(j, depth + 1):
        c = levels[k]
        sel = (c.keys >> (k - j)) == J
        occ = [int(v) for v in c.nums[sel].tolist()]
        n_empty = (1 << (k - j)) - len(occ)
        sq = sum(v * v for v in occ) + n_empty * c.empty_num * c.empty_num
        total += Fraction(sq << k, 1 << (2 * c.exponent))
    return total * (1 << j)


def _bmo1_from_mapping(coeffs: Mapping, depth: int, jmax: int) -> Fraction:
    best = Fraction(0)
    for j in range(jmax + 1):
        sums: dict[int, Fraction] = {}
        for (k, i), c in coeffs.items():
            if j <= k <= depth:
                J = i >> (k - j)
                sums[J] = sums.get(J, Fraction(0)) + Fraction(c) ** 2 * (1 << k)
        if sums:
            best = max(best, max(sums.values()) * (1 << j))
    return best


# -- validation of the h^{0,0} reduction -------------------------------------------

def tilde_coefficient(ps: PointSet, k: int, i: int, l: int, j: int) -> Fraction:
    """``<D~, h_R>`` where ``D~`` removes the one-variable averages of ``D``.

    ``D~(x) = D(x) - int D dx1 - int D dx2 + int int D``, integrated over the
    four quadrants of ``R`` from box integrals of ``D`` alone.
    """
    a, b = Fraction(i, 1 << k), Fraction(i + 1, 1 << k)
    c, d = Fraction(j, 1 << l), Fraction(j + 1, 1 << l)
    mx, my = (a + b) / 2, (c + d) / 2
    mean = box_integral(ps, 0, 1, 0, 1)

    def box_tilde(x0, x1, y0, y1):
        X0, X1, Y0, Y1 = (Dyadic.coerce(v) for v in (x0, x1, y0, y1))
        return (box_integral(ps, X0, X1, Y0, Y1)
                - (x1 - x0) * box_integral(ps, 0, 1, Y0, Y1)
                - (y1 - y0) * box_integral(ps, X0, X1, 0, 1)
                + (x1 - x0) * (y1 - y0) * mean)

    total = Fraction(0)
    for x0, x1, sx in ((a, mx, -1), (mx, b, 1)):
        for y0, y1, sy in ((c, my, -1), (my, d, 1)):
            total += sx * sy * box_tilde(x0, x1, y0, y1)
    return total


def tilde_global_square_sum(ps: PointSet, depth: int) -> Fraction:
    """Square sum over ``[0,1]^2`` from :func:`tilde_coefficient` (slow; small sets only)."""
    total = Fraction(0)
    for k, l in shapes_up_to(depth):
        for i in range(1 << k):
            for j in range(1 << l):
                v = tilde_coefficient(ps, k, i, l, j)
                total += v * v * (1 << (k + l))
    return total
