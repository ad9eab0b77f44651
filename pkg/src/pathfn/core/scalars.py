"""Scalar arithmetic in two modes: exact rationals and floats with certified error bounds.

Exact values are ``fractions.Fraction`` (always reduced, positive denominator
-- the stdlib guarantees both).  Float values are :class:`Approx`, a
``(value, err)`` pair whose invariant is ``|true - value| <= err``.  Every
operation rounds the bound outward (one ulp of slack per step), so bounds
only ever grow and a chain of operations stays certified.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")

_INF = math.inf


class RationalFormatError(ValueError):
    """Raised for literals that are not integers or 'p/q' strings."""


def parse_rational(text: Union[str, int]) -> Fraction:
    """Parse a rational literal: an integer or a string like ``"3/4"`` / ``"-2"``."""
    if isinstance(text, bool):
        raise RationalFormatError(f"not a rational literal: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        s = text.strip()
        if _RATIONAL_RE.match(s):
            if "/" in s and int(s.split("/")[1]) == 0:
                raise RationalFormatError(f"zero denominator: {text!r}")
            return Fraction(s)
    raise RationalFormatError(f"not a rational literal: {text!r}")


def format_rational(q: Fraction) -> str:
    """Canonical string form, ``"p/q"`` or ``"p"`` for integers."""
    return str(q)


def reduce_mod1(x: Fraction) -> Fraction:
    """x mod 1 as an exact rational in [0, 1)."""
    return x - (x.numerator // x.denominator)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _ulp(x: float) -> float:
    return math.ulp(x)


def _add_up(*terms: float) -> float:
    """Sum of nonnegative error terms, rounded outward at every step."""
    s = 0.0
    for t in terms:
        s = _up(s + t)
    return s


def _mul_up(a: float, b: float) -> float:
    return _up(a * b)


@dataclass(frozen=True)
class Approx:
    """A float with a certified absolute error bound: the true value lies in
    ``[value - err, value + err]``."""

    value: float
    err: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite value: {self.value}")
        if not (self.err >= 0.0) or not math.isfinite(self.err):
            raise ValueError(f"bad error bound: {self.err}")

    @staticmethod
    def from_fraction(q: Fraction) -> "Approx":
        v = float(q)  # correctly rounded by the stdlib
        return Approx(v, _ulp(v))

    @staticmethod
    def coerce(x: "ApproxLike") -> "Approx":
        if isinstance(x, Approx):
            return x
        if isinstance(x, Fraction):
            return Approx.from_fraction(x)
        if isinstance(x, int):
            return Approx(float(x), 0.0)
        if isinstance(x, float):
            return Approx(x, 0.0)
        raise TypeError(f"cannot coerce {type(x).__name__} to Approx")

    # interval endpoints (outward-rounded)
    def lo(self) -> float:
        return _down(self.value - self.err)

    def hi(self) -> float:
        return _up(self.value + self.err)

    def __add__(self, other: "ApproxLike") -> "Approx":
        o = Approx.coerce(other)
        v = self.value + o.value
        return Approx(v, _add_up(self.err, o.err, _ulp(v)))

    __radd__ = __add__

    def __neg__(self) -> "Approx":
        return Approx(-self.value, self.err)

    def __sub__(self, other: "ApproxLike") -> "Approx":
        return self + (-Approx.coerce(other))

    def __rsub__(self, other: "ApproxLike") -> "Approx":
        return Approx.coerce(other) + (-self)

    def __mul__(self, other: "ApproxLike") -> "Approx":
        o = Approx.coerce(other)
        v = self.value * o.value
        e = _add_up(
            _mul_up(abs(self.value), o.err),
            _mul_up(abs(o.value), self.err),
            _mul_up(self.err, o.err),
            _ulp(v),
        )
        return Approx(v, e)

    __rmul__ = __mul__

    def __truediv__(self, other: "ApproxLike") -> "Approx":
        o = Approx.coerce(other)
        m = _down(abs(o.value) - o.err)
        if m <= 0.0:
            raise ZeroDivisionError("division by an interval containing zero")
        v = self.value / o.value
        num = _add_up(_mul_up(self.err, abs(o.value)), _mul_up(abs(self.value), o.err))
        e = _add_up(_up(num / _down(m * abs(o.value))), _ulp(v))
        return Approx(v, e)

    def __rtruediv__(self, other: "ApproxLike") -> "Approx":
        return Approx.coerce(other) / self

    def abs(self) -> "Approx":
        return Approx(abs(self.value), self.err)

    def frac(self) -> "Approx":
        """Value mod 1.  fmod is exact for IEEE doubles; the +1 for negatives
        costs at most one ulp."""
        v = math.fmod(self.value, 1.0)
        if v < 0.0:
            v += 1.0
            return Approx(v, _add_up(self.err, _ulp(v)))
        return Approx(v, self.err)

    @staticmethod
    def min2(a: "Approx", b: "Approx") -> "Approx":
        # |min(a*,b*) - min(a,b)| <= max(ea, eb)
        return Approx(min(a.value, b.value), max(a.err, b.err))

    @staticmethod
    def max2(a: "Approx", b: "Approx") -> "Approx":
        return Approx(max(a.value, b.value), max(a.err, b.err))

    # certain comparisons; None when the intervals overlap
    def definitely_le(self, other: "ApproxLike") -> bool:
        o = Approx.coerce(other)
        return self.hi() <= o.lo()

    def definitely_lt(self, other: "ApproxLike") -> bool:
        o = Approx.coerce(other)
        return self.hi() < o.lo()

    def overlaps(self, other: "ApproxLike") -> bool:
        o = Approx.coerce(other)
        return not (self.hi() < o.lo() or o.hi() < self.lo())

    def as_json(self) -> dict:
        return {"value": self.value, "error_bound": self.err}

    def __str__(self) -> str:
        return f"{self.value!r} ± {self.err:.3e}"


ApproxLike = Union[Approx, Fraction, int, float]

# Scalar: the two arithmetic modes of the toolkit.
Scalar = Union[Fraction, Approx]


def scalar_to_json(s: Scalar):
    """JSON form: rationals as 'p/q' strings, floats as value/error objects."""
    if isinstance(s, Fraction):
        return format_rational(s)
    return s.as_json()


# Certified trigonometric primitives.  libm's sin is assumed correct to within
# 2 ulps; the argument-scaling constants below are outward roundings of pi
# and 2*pi, used as Lipschitz factors for input error.
_PI_HI = _up(math.pi)
_TWO_PI_HI = _up(2.0 * math.pi)
_SIN_ULPS = 3.0  # libm slack, in ulps of 1.0


def sin_pi_abs_bounds(xv: float, xe: float) -> Tuple[float, float]:
    """(value, err) form of |sin(pi x)| for hot loops."""
    arg = math.pi * xv
    v = abs(math.sin(arg))
    e = _add_up(
        _mul_up(_PI_HI, xe),               # input uncertainty, Lipschitz pi
        _mul_up(abs(xv), _ulp(math.pi)),   # pi is not exactly representable
        _ulp(arg),                         # rounding of the product
        _SIN_ULPS * _ulp(1.0),             # libm sin
    )
    return v, e


def sin_2pi_bounds(xv: float, xe: float) -> Tuple[float, float]:
    """(value, err) form of sin(2 pi x) for hot loops."""
    arg = 2.0 * math.pi * xv
    v = math.sin(arg)
    e = _add_up(
        _mul_up(_TWO_PI_HI, xe),
        _mul_up(2.0 * abs(xv), _ulp(math.pi)),
        2.0 * _ulp(arg),
        _SIN_ULPS * _ulp(1.0),
    )
    return v, e


def sin_pi_abs(x: Approx) -> Approx:
    """|sin(pi * x)| with a certified bound."""
    return Approx(*sin_pi_abs_bounds(x.value, x.err))


def sin_2pi(x: Approx) -> Approx:
    """sin(2 * pi * x) with a certified bound."""
    return Approx(*sin_2pi_bounds(x.value, x.err))
