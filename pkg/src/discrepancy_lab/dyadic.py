"""Exact dyadic rationals and the binary digit operations built on them.

Every coordinate, measure and Haar coefficient in the package is a number of
the form ``a / 2**b``.  :class:`Dyadic` stores such numbers exactly using
Python integers, so no operation in this module ever rounds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DepthError, DomainError, ParseError

#: Largest digit depth ``n`` accepted by point-set constructors.
MAX_DEPTH = 40

_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


def _is_power_of_two(d: int) -> bool:
    return d > 0 and d & (d - 1) == 0


class Dyadic:
    """An exact number ``numerator / 2**exponent``.

    The representation is canonical: the numerator is odd unless the exponent
    is zero, and zero is stored as ``0 / 2**0``.  Equality is therefore a
    comparison of the two fields.
    """

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        numerator = int(numerator)
        exponent = int(exponent)
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        elif exponent:
            tz = (numerator & -numerator).bit_length() - 1
            shift = min(tz, exponent)
            numerator >>= shift
            exponent -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def coerce(cls, value: "DyadicLike") -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        if isinstance(value, Fraction):
            if not _is_power_of_two(value.denominator):
                raise DomainError(f"{value} is not a dyadic rational")
            return cls(value.numerator, value.denominator.bit_length() - 1)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot interpret {value!r} as a dyadic rational")

    @classmethod
    def parse(cls, text: str, *, strict: bool = True) -> "Dyadic":
        """Parse ``"num/2^exp"``; with ``strict`` the numerator must be canonical."""
        m = _DYADIC_RE.match(text)
        if m is None:
            raise ParseError(f"malformed dyadic rational {text!r}")
        num, exp = int(m.group(1)), int(m.group(2))
        value = cls(num, exp)
        if strict and (value.numerator != num or value.exponent != exp):
            raise ParseError(f"non-canonical dyadic rational {text!r}")
        return value

    # -- conversions --------------------------------------------------------

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def __float__(self) -> float:
        return float(self.as_fraction())

    def scaled_numerator(self, exponent: int) -> int:
        """Numerator of ``self`` over the denominator ``2**exponent``."""
        if exponent < self.exponent:
            raise DomainError(f"{self} needs at least {self.exponent} binary digits")
        return self.numerator << (exponent - self.exponent)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.numerator}, {self.exponent})"

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return (self.numerator << (e - self.exponent),
                other.numerator << (e - other.exponent), e)

    def __add__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, DomainError):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, DomainError):
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, DomainError):
            return NotImplemented
        return other - self

    def __mul__(self, other):
        try:
            other = Dyadic.coerce(other)
        except (TypeError, DomainError):
            return NotImplemented
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __abs__(self):
        return Dyadic(abs(self.numerator), self.exponent)

    def ldexp(self, k: int) -> "Dyadic":
        """Return ``self * 2**k`` for any integer ``k``."""
        return Dyadic(self.numerator, self.exponent - k)

    def floor(self) -> int:
        return self.numerator >> self.exponent

    def frac(self) -> "Dyadic":
        """Fractional part ``{x}`` in ``[0, 1)``."""
        return Dyadic(self.numerator & ((1 << self.exponent) - 1), self.exponent)

    # -- comparison ---------------------------------------------------------

    def _cmp_key(self, other) -> tuple[int, int]:
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
            return a, b
        f = Fraction(other)
        return self.numerator * f.denominator, f.numerator << self.exponent

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.numerator == other.numerator and self.exponent == other.exponent
        if isinstance(other, (int, Fraction, np.integer)):
            a, b = self._cmp_key(other)
            return a == b
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction())

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._cmp_key(other)
        return a >= b


DyadicLike = Union[Dyadic, int, Fraction, str]

ZERO = Dyadic(0)
HALF = Dyadic(1, 1)
ONE = Dyadic(1)


@dataclass(frozen=True)
class DigitString:
    """The first ``n`` binary digits of a digital shift ``sigma``.

    ``bits[i - 1]`` is the digit ``d_i(sigma)``.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise DomainError("a digit string needs at least one digit")
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"digits must be 0 or 1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def from_str(cls, text: str) -> "DigitString":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise DomainError(f"not a bit string: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def zeros(cls, n: int) -> "DigitString":
        return cls((0,) * n)

    @classmethod
    def balanced(cls, n: int) -> "DigitString":
        """``floor(n/2)`` ones in the leading positions, zeros after."""
        h = n // 2
        return cls((1,) * h + (0,) * (n - h))

    @classmethod
    def random(cls, n: int, seed: int) -> "DigitString":
        rng = np.random.default_rng(seed)
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=n)))

    @classmethod
    def from_int(cls, value: int, n: int) -> "DigitString":
        """Digits of ``value / 2**n``, most significant first."""
        if not 0 <= value < (1 << n):
            raise DomainError(f"{value} does not fit in {n} digits")
        return cls(tuple((value >> (n - i)) & 1 for i in range(1, n + 1)))

    def as_int(self) -> int:
        """The integer ``sigma * 2**n``."""
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    def as_dyadic(self) -> Dyadic:
        return Dyadic(self.as_int(), self.n)

    def weight(self) -> int:
        """Number of scrambled digits, ``sum_k d_k(sigma)``."""
        return sum(self.bits)

    def reversed(self) -> "DigitString":
        return DigitString(self.bits[::-1])

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _check_unit(x: Dyadic) -> None:
    if not (0 <= x.numerator and x.numerator < (1 << x.exponent)):
        raise DomainError(f"{x} is outside [0, 1)")


def digit(x: DyadicLike, i: int) -> int:
    """The ``i``-th binary digit ``floor(2**i x) mod 2`` of ``x`` in ``[0, 1)``."""
    x = Dyadic.coerce(x)
    _check_unit(x)
    if i < 1:
        raise DomainError("digit positions start at 1")
    if i > x.exponent:
        return 0
    return (x.numerator >> (x.exponent - i)) & 1


def reverse_bits(value: int, n: int) -> int:
    """Reverse the ``n``-bit binary representation of a non-negative integer."""
    out = 0
    for _ in range(n):
        out = (out << 1) | (value & 1)
        value >>= 1
    return out


def reverse_bits_array(values: np.ndarray, n: int) -> np.ndarray:
    values = np.asarray(values)
    out = np.zeros_like(values)
    v = values.copy()
    for _ in range(n):
        out = (out << 1) | (v & 1)
        v = v >> 1
    return out


def reverse_digits(x: DyadicLike, n: int) -> Dyadic:
    """``rev_n``: reverse the first ``n`` binary digits of ``x``.

    ``x`` must have no nonzero digits beyond position ``n``.
    """
    x = Dyadic.coerce(x)
    _check_unit(x)
    if n < 1:
        raise DomainError("n must be positive")
    if x.exponent > n:
        raise DomainError(f"{x} has nonzero digits beyond position {n}")
    return Dyadic(reverse_bits(x.scaled_numerator(n), n), n)


def digital_shift(x: DyadicLike, sigma: DigitString) -> Dyadic:
    """``x (+) sigma``: XOR the first ``sigma.n`` digits of ``x`` with ``sigma``.

    Digits of ``x`` beyond position ``sigma.n`` pass through unchanged.
    """
    x = Dyadic.coerce(x)
    _check_unit(x)
    e = max(x.exponent, sigma.n)
    a = x.scaled_numerator(e)
    s = sigma.as_int() << (e - sigma.n)
    return Dyadic(a ^ s, e)


def phi(x: DyadicLike) -> Dyadic:
    """Distance from ``x`` to the nearest integer.

    This is the periodic antiderivative of the Haar function on ``[0, 1)``:
    ``{x}`` on ``[0, 1/2]`` and ``1 - {x}`` on ``[1/2, 1)``, continuous at the
    breakpoints.
    """
    f = Dyadic.coerce(x).frac()
    return f if f <= HALF else ONE - f


def phi_numerators(values: np.ndarray, shift: int, scale: int) -> np.ndarray:
    """Vectorised ``phi(2**shift * v / 2**scale)`` as numerators over ``2**scale``."""
    if shift >= scale:
        return np.zeros_like(values)
    mask = (1 << scale) - 1
    f = (values << shift) & mask
    return np.minimum(f, (1 << scale) - f)


def check_depth(n: int) -> None:
    if not 1 <= n <= MAX_DEPTH:
        raise DepthError(f"depth n={n} outside the supported range 1..{MAX_DEPTH}")


def render(value) -> str:
    """Render an exact rational as ``num/2^exp`` when dyadic, else ``num/den``."""
    if isinstance(value, Dyadic):
        return str(value)
    f = Fraction(value)
    if _is_power_of_two(f.denominator):
        return str(Dyadic.coerce(f))
    return f"{f.numerator}/{f.denominator}"
