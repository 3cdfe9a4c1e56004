"""Digit-scrambled van der Corput sets and generic finite point sets.

Coordinates are held as integer numerators over a common denominator
``2**scale`` so that bulk queries run on integer arrays without rounding.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .dyadic import (
    DigitString,
    Dyadic,
    DyadicLike,
    check_depth,
    reverse_bits_array,
)
from .errors import DomainError, DuplicatePointError, ParseError, RangeError

KINDS = ("vdc", "vdc-truncated", "external")


class Point(NamedTuple):
    x: Dyadic
    y: Dyadic


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """``[index * 2**-level, (index + 1) * 2**-level)``."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.index < (1 << self.level):
            raise DomainError(f"invalid dyadic interval ({self.level}, {self.index})")

    @property
    def length(self) -> Dyadic:
        return Dyadic(1, self.level)

    @property
    def left(self) -> Dyadic:
        return Dyadic(self.index, self.level)

    @property
    def right(self) -> Dyadic:
        return Dyadic(self.index + 1, self.level)

    def contains(self, x: DyadicLike) -> bool:
        x = Dyadic.coerce(x)
        return self.left <= x < self.right

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return (DyadicInterval(self.level + 1, 2 * self.index),
                DyadicInterval(self.level + 1, 2 * self.index + 1))

    def parent_at(self, level: int) -> "DyadicInterval":
        if level > self.level:
            raise DomainError("ancestor level must not exceed the interval level")
        return DyadicInterval(level, self.index >> (self.level - level))


UNIT = DyadicInterval(0, 0)


@dataclass(frozen=True, order=True)
class DyadicRectangle:
    rx: DyadicInterval
    ry: DyadicInterval

    @classmethod
    def of(cls, k: int, i: int, l: int, j: int) -> "DyadicRectangle":
        return cls(DyadicInterval(k, i), DyadicInterval(l, j))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rx.level, self.ry.level

    @property
    def volume(self) -> Dyadic:
        return Dyadic(1, self.rx.level + self.ry.level)

    def contains(self, p) -> bool:
        return self.rx.contains(p[0]) and self.ry.contains(p[1])

    def __str__(self) -> str:
        return f"R(k={self.rx.level}, i={self.rx.index}, l={self.ry.level}, j={self.ry.index})"


UNIT_SQUARE = DyadicRectangle(UNIT, UNIT)


def rectangles_of_shape(k: int, l: int) -> Iterator[DyadicRectangle]:
    """All dyadic rectangles with side lengths ``2**-k`` by ``2**-l``, lexicographic."""
    for i in range(1 << k):
        for j in range(1 << l):
            yield DyadicRectangle.of(k, i, l, j)


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered finite set of points in ``[0, 1)^2``.

    ``xs[t] / 2**scale`` and ``ys[t] / 2**scale`` are the coordinates of the
    ``t``-th point.
    """

    xs: np.ndarray
    ys: np.ndarray
    scale: int
    kind: str = "external"
    n: int | None = None
    sigma: DigitString | None = None
    _points: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown point-set kind {self.kind!r}")
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise DomainError("coordinate arrays must be one-dimensional and equal length")
        if xs.dtype != object and xs.dtype != np.int64:
            xs = xs.astype(np.int64)
            ys = ys.astype(np.int64)
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        top = 1 << self.scale
        if len(xs) and (min(xs.min(), ys.min()) < 0 or max(xs.max(), ys.max()) >= top):
            raise DomainError("coordinates must lie in [0, 1)")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_points(cls, points: Iterable[Sequence[DyadicLike]], *, kind: str = "external",
                    n: int | None = None, sigma: DigitString | None = None,
                    check_distinct: bool = True) -> "PointSet":
        pts = [(Dyadic.coerce(p[0]), Dyadic.coerce(p[1])) for p in points]
        for x, y in pts:
            for c in (x, y):
                if not 0 <= c < 1:
                    raise DomainError(f"coordinate {c} is outside [0, 1)")
        scale = max([max(x.exponent, y.exponent) for x, y in pts], default=0)
        dtype = np.int64 if scale <= 62 else object
        xs = np.array([x.scaled_numerator(scale) for x, _ in pts], dtype=dtype)
        ys = np.array([y.scaled_numerator(scale) for _, y in pts], dtype=dtype)
        ps = cls(xs, ys, scale, kind=kind, n=n, sigma=sigma)
        if check_distinct:
            ps.check_distinct()
        return ps

    def check_distinct(self) -> None:
        seen = set(zip(self.xs.tolist(), self.ys.tolist()))
        if len(seen) != len(self.xs):
            raise DuplicatePointError("point set contains repeated points")

    # -- views --------------------------------------------------------------

    @property
    def N(self) -> int:
        return len(self.xs)

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def points(self) -> list[Point]:
        if self._points is None:
            s = self.scale
            pts = [Point(Dyadic(int(x), s), Dyadic(int(y), s))
                   for x, y in zip(self.xs.tolist(), self.ys.tolist())]
            object.__setattr__(self, "_points", pts)
        return self._points

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, t: int) -> Point:
        return self.points[t]

    def same_points(self, other: "PointSet") -> bool:
        """Bitwise equality of the ordered coordinates (metadata ignored)."""
        return self.points == other.points

    def as_set(self) -> frozenset:
        return frozenset(self.points)

    def rescaled(self, scale: int) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate numerators over ``2**scale`` (``scale >= self.scale``)."""
        if scale < self.scale:
            raise DomainError("cannot express coordinates over a coarser denominator")
        shift = scale - self.scale
        if scale > 62:
            xs = np.array([int(v) << shift for v in self.xs.tolist()], dtype=object)
            ys = np.array([int(v) << shift for v in self.ys.tolist()], dtype=object)
            return xs, ys
        return self.xs << shift, self.ys << shift

    def header(self) -> str:
        if self.kind == "external":
            return f"#external N={self.N}"
        tag = "vdc" if self.kind == "vdc" else "vdc-truncated"
        return f"#{tag} n={self.n} sigma={self.sigma}"

    def __repr__(self) -> str:
        return f"PointSet({self.header()[1:]})"


# -- van der Corput ----------------------------------------------------------

def vdc_numerators(n: int, sigma: DigitString) -> tuple[np.ndarray, np.ndarray]:
    """Integer coordinates of ``V_{n, sigma}`` over ``2**(n+1)``, in tau order."""
    tau = np.arange(1 << n, dtype=np.int64)
    y = reverse_bits_array(tau ^ sigma.as_int(), n)
    return 2 * tau + 1, 2 * y + 1


def generate_vdc(n: int, sigma: DigitString | str | None = None) -> PointSet:
    """The digit-scrambled van der Corput set of ``2**n`` points.

    Point ``tau`` is ``(tau / 2**n, rev_n(tau / 2**n (+) sigma))`` shifted by
    ``2**-(n+1)`` in both coordinates.
    """
    check_depth(n)
    sigma = _coerce_sigma(sigma, n)
    xs, ys = vdc_numerators(n, sigma)
    return PointSet(xs, ys, n + 1, kind="vdc", n=n, sigma=sigma)


def general_n_set(n: int, sigma: DigitString | str | None, N: int) -> PointSet:
    """The first ``N + 1`` points of ``V_{n, sigma}`` (``2**(n-1) < N < 2**n``)."""
    check_depth(n)
    if not (1 << (n - 1)) < N < (1 << n):
        raise RangeError(f"N={N} must satisfy 2^{n - 1} < N < 2^{n}")
    sigma = _coerce_sigma(sigma, n)
    xs, ys = vdc_numerators(n, sigma)
    return PointSet(xs[: N + 1].copy(), ys[: N + 1].copy(), n + 1,
                    kind="vdc-truncated", n=n, sigma=sigma)


def _coerce_sigma(sigma, n: int) -> DigitString:
    if sigma is None:
        return DigitString.zeros(n)
    if isinstance(sigma, str):
        sigma = DigitString.from_str(sigma)
    if sigma.n != n:
        raise DomainError(f"sigma has {sigma.n} digits, expected {n}")
    return sigma


# -- rectangle queries -------------------------------------------------------

def cell_keys(ps: PointSet, k: int, l: int) -> np.ndarray:
    """For each point, the flat index ``i * 2**l + j`` of its rectangle of shape ``(k, l)``."""
    s = ps.scale
    if max(k, l) > s:
        xs, ys = ps.rescaled(max(k, l))
        s = max(k, l)
    else:
        xs, ys = ps.xs, ps.ys
    i = xs >> (s - k)
    j = ys >> (s - l)
    if k + l <= 62:
        return (i.astype(np.int64) << l) | j.astype(np.int64)
    return np.array([(int(a) << l) | int(b) for a, b in zip(i, j)], dtype=object)


def rectangle_counts(ps: PointSet, k: int, l: int) -> np.ndarray:
    """Number of points in each rectangle of shape ``(k, l)``, indexed ``[i, j]``."""
    counts = np.bincount(cell_keys(ps, k, l), minlength=1 << (k + l))
    return counts.reshape(1 << k, 1 << l)


def points_in_rectangle(ps: PointSet, R: DyadicRectangle) -> list[Point]:
    """The points of ``ps`` in the half-open rectangle ``R``, in set order."""
    k, l = R.shape
    key = (R.rx.index << l) | R.ry.index
    hits = np.flatnonzero(cell_keys(ps, k, l) == key)
    pts = ps.points
    return [pts[t] for t in hits.tolist()]


def net_violations(ps: PointSet, n: int) -> int:
    """Number of volume-``2**-n`` dyadic rectangles not holding exactly one point."""
    bad = 0
    for k in range(n + 1):
        bad += int(np.count_nonzero(rectangle_counts(ps, k, n - k) != 1))
    return bad


# -- file format -------------------------------------------------------------

def save_points(ps: PointSet, destination) -> None:
    """Write ``ps`` in the exact text format (header line then one point per line)."""
    lines = [ps.header()]
    lines.extend(f"{p.x} {p.y}" for p in ps.points)
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(os.fspath(destination), "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise ParseError("missing header line", 1)
    parts = line[1:].split()
    if not parts or parts[0] not in KINDS:
        raise ParseError(f"unknown header {line!r}", 1)
    meta = {"kind": parts[0]}
    for item in parts[1:]:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"malformed header field {item!r}", 1)
        meta[key] = value
    return meta


def load_points(source) -> PointSet:
    """Parse the exact text format produced by :func:`save_points`."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(os.fspath(source), encoding="utf-8") as fh:
            text = fh.read()
    lines = io.StringIO(text).read().splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    meta = _parse_header(lines[0].strip())
    pts = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected two coordinates, got {len(fields)}", lineno)
        try:
            x, y = (Dyadic.parse(f) for f in fields)
        except ParseError as exc:
            raise ParseError(str(exc), lineno) from None
        for c in (x, y):
            if not 0 <= c < 1:
                raise DomainError(f"line {lineno}: coordinate {c} is outside [0, 1)")
        pts.append((x, y))
    seen = set()
    for lineno, p in enumerate(pts, start=2):
        if p in seen:
            raise DuplicatePointError(f"duplicate point {p[0]} {p[1]}")
        seen.add(p)

    kind = meta["kind"]
    try:
        if kind == "external":
            declared = int(meta.get("N", len(pts)))
            if declared != len(pts):
                raise ParseError(f"header declares N={declared} but {len(pts)} points follow", 1)
            return PointSet.from_points(pts, check_distinct=False)
        n = int(meta["n"])
        sigma = DigitString.from_str(meta["sigma"])
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad header: {exc}", 1) from None
    return PointSet.from_points(pts, kind=kind, n=n, sigma=sigma, check_distinct=False)
