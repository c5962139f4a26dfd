"""Outward-rounded interval arithmetic over dyadic rationals.

Endpoints are :class:`fractions.Fraction` values whose denominators are
powers of two.  After every operation the lower endpoint is rounded down
and the upper endpoint up to ``prec`` significant bits, so each result
encloses the exact real value of the expression.  ``sqrt``, ``exp`` and
``pi`` are computed with integer fixed-point arithmetic and explicit
error accounting.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

DEFAULT_PRECISION = 96
MIN_PRECISION = 32

Number = Union[int, Fraction]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)  # exact binary value of the float
    raise TypeError(f"cannot use {type(x).__name__} as an exact number")


def round_dyadic(x: Fraction, prec: int, up: bool) -> Fraction:
    """Round ``x`` to ``prec`` significant bits, toward +inf if ``up`` else -inf."""
    if x == 0:
        return x
    num, den = x.numerator, x.denominator
    shift = prec - (abs(num).bit_length() - den.bit_length())
    if shift >= 0:
        q, r = divmod(num << shift, den)
    else:
        q, r = divmod(num, den << -shift)
    if up and r:
        q += 1
    if shift >= 0:
        return Fraction(q, 1 << shift)
    return Fraction(q << -shift)


def _down(x: Fraction, prec: int) -> Fraction:
    return round_dyadic(x, prec, up=False)


def _up(x: Fraction, prec: int) -> Fraction:
    return round_dyadic(x, prec, up=True)


# -- elementary enclosures on exact rationals ---------------------------------


def sqrt_bounds(a: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    if a < 0:
        raise ValueError(f"sqrt of negative value {a}")
    if a == 0:
        return Fraction(0), Fraction(0)
    # enough fractional bits for prec significant bits of the result
    mag = a.numerator.bit_length() - a.denominator.bit_length()
    p = prec + max(0, -mag // 2 + 1) + 2
    scaled = a * (1 << (2 * p))
    lo = math.isqrt(math.floor(scaled))
    n_up = math.ceil(scaled)
    hi = math.isqrt(n_up)
    if hi * hi < n_up:
        hi += 1
    return _down(Fraction(lo, 1 << p), prec), _up(Fraction(hi, 1 << p), prec)


def _exp_small(y: Fraction, w: int) -> tuple[int, int]:
    """Fixed-point enclosure of exp(y) for |y| <= 1/2, in units of 2**-w."""
    one = 1 << w
    yf = math.floor(y * one)  # error < 1 ulp
    total = one
    term = one
    j = 0
    while True:
        j += 1
        term = (term * yf) // (j * one)
        if term == 0:
            break
        total += term
    # per-term error <= 4 ulps (truncation + |y| <= 1/2 propagation), tail <= 2 ulps
    err = 4 * (j + 1) + 8
    return total - err, total + err


def exp_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    if x == 0:
        return Fraction(1), Fraction(1)
    cutoff = prec + 64
    if x < -cutoff:
        # exp is increasing: 0 < exp(x) <= exp(-cutoff)
        return Fraction(0), exp_bounds(Fraction(-cutoff), prec)[1]
    if x > 1 << 24:
        raise OverflowError(f"exp argument {float(x):.3g} too large")
    s = 0
    while abs(x) > Fraction(1, 2) * (1 << s):
        s += 1
    y = x / (1 << s)
    w = prec + 2 * s + 24
    lo_i, hi_i = _exp_small(y, w)
    wp = prec + s + 16
    lo = _down(Fraction(lo_i, 1 << w), wp)
    hi = _up(Fraction(hi_i, 1 << w), wp)
    for _ in range(s):
        lo = _down(lo * lo, wp)
        hi = _up(hi * hi, wp)
    return _down(lo, prec), _up(hi, prec)


def _arctan_inv(x: int, one: int) -> tuple[int, int]:
    """Fixed-point arctan(1/x) and an error bound, both in ulps of ``one``."""
    power = one // x
    total = power
    x2 = x * x
    k = 1
    sign = -1
    while power:
        power //= x2
        k += 2
        total += sign * (power // k)
        sign = -sign
    terms = k // 2 + 1
    return total, 4 * terms + 4


@lru_cache(maxsize=32)
def pi_bounds(prec: int) -> tuple[Fraction, Fraction]:
    w = prec + 32
    one = 1 << w
    a, ea = _arctan_inv(5, one)
    b, eb = _arctan_inv(239, one)
    p = 16 * a - 4 * b
    err = 16 * ea + 4 * eb
    return _down(Fraction(p - err, one), prec), _up(Fraction(p + err, one), prec)


# -- the interval type ----------------------------------------------------------


class IntervalValue:
    """A closed interval ``[lo, hi]`` certified to contain a real quantity."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PRECISION):
        lo = _as_fraction(lo)
        hi = lo if hi is None else _as_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    @classmethod
    def exact(cls, x, prec: int = DEFAULT_PRECISION) -> "IntervalValue":
        return cls(x, x, prec)

    @classmethod
    def pi(cls, prec: int = DEFAULT_PRECISION) -> "IntervalValue":
        lo, hi = pi_bounds(prec)
        return cls(lo, hi, prec)

    def _coerce(self, other) -> "IntervalValue":
        if isinstance(other, IntervalValue):
            return other
        return IntervalValue.exact(_as_fraction(other), self.prec)

    def _make(self, lo: Fraction, hi: Fraction, prec: int) -> "IntervalValue":
        return IntervalValue(_down(lo, prec), _up(hi, prec), prec)

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        return self._make(self.lo + o.lo, self.hi + o.hi, p)

    __radd__ = __add__

    def __neg__(self):
        return IntervalValue(-self.hi, -self.lo, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return self._make(min(prods), max(prods), p)

    __rmul__ = __mul__

    def reciprocal(self) -> "IntervalValue":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError(f"interval {self} contains zero")
        return self._make(1 / self.hi, 1 / self.lo, self.prec)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def sqrt(self) -> "IntervalValue":
        if self.lo < 0:
            raise ValueError(f"sqrt of interval with negative part {self}")
        return IntervalValue(sqrt_bounds(self.lo, self.prec)[0], sqrt_bounds(self.hi, self.prec)[1], self.prec)

    def exp(self) -> "IntervalValue":
        return IntervalValue(exp_bounds(self.lo, self.prec)[0], exp_bounds(self.hi, self.prec)[1], self.prec)

    # queries
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = _as_fraction(x)
        return self.lo <= x <= self.hi

    def certainly_positive(self) -> bool:
        return self.lo > 0

    def certainly_negative(self) -> bool:
        return self.hi < 0

    def to_strings(self, digits: int = 20) -> list[str]:
        """Decimal endpoints, rounded outward."""
        return [_decimal_str(self.lo, digits, up=False), _decimal_str(self.hi, digits, up=True)]

    def __repr__(self):
        lo, hi = self.to_strings(12)
        return f"IntervalValue([{lo}, {hi}], prec={self.prec})"


def _decimal_str(x: Fraction, digits: int, up: bool) -> str:
    if x == 0:
        return "0"
    e = math.floor(math.log10(abs(x.numerator)) - math.log10(x.denominator))
    while True:
        v = x * Fraction(10) ** (digits - 1 - e)
        m = math.ceil(v) if up else math.floor(v)
        if abs(m) < 10**digits:
            break
        e += 1
    sign = "-" if m < 0 else ""
    s = str(abs(m)).rjust(digits, "0")
    return f"{sign}{s[0]}.{s[1:]}e{e:+d}"


def iv(x, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    """Exact interval for an int, Fraction or ``"num/den"`` string."""
    if isinstance(x, str):
        x = Fraction(x)
    return IntervalValue.exact(x, prec)
