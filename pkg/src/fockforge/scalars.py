"""Scalar coefficients in two modes.

``exact`` mode uses :class:`GaussianRational`, a pair of rationals backed by
``gmpy2.mpq``; every ring operation is closed and lossless.  ``float`` mode
uses the builtin :class:`complex`, whose unit roundoff is ``2**-53``.

Mixing the two modes inside one expression raises :class:`ScalarModeError`
instead of silently coercing.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2

UNIT_ROUNDOFF = 2.0**-53

EXACT = "exact"
FLOAT = "float"


class ScalarModeError(TypeError):
    """Raised when exact and float scalars meet in one expression."""


def _q(value) -> gmpy2.mpq:
    if isinstance(value, (float, complex)):
        raise ScalarModeError(f"float value {value!r} in exact-mode arithmetic")
    if isinstance(value, str):
        return gmpy2.mpq(value.strip())
    if isinstance(value, Fraction):
        return gmpy2.mpq(value.numerator, value.denominator)
    return gmpy2.mpq(value)


_RATIONAL_TYPES = (int, Fraction, type(gmpy2.mpq(0)), type(gmpy2.mpz(0)))


class GaussianRational:
    """An element ``re + i*im`` of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _q(re)
        self.im = _q(im)

    @classmethod
    def _make(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, _RATIONAL_TYPES) or isinstance(other, Rational):
            return GaussianRational._make(_q(other), gmpy2.mpq(0))
        if isinstance(other, (float, complex)):
            raise ScalarModeError(f"cannot mix exact scalar with float {other!r}")
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._make(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.im:
            return GaussianRational._make(self.re * o.re, self.im * o.re)
        return GaussianRational._make(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if not den:
            raise ZeroDivisionError("division by exact zero")
        return GaussianRational._make(
            (self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers of exact scalars")
        if n < 0:
            return (1 / self) ** (-n)
        result = GaussianRational._make(gmpy2.mpq(1), gmpy2.mpq(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> GaussianRational:
        return GaussianRational._make(self.re, -self.im)

    def abs2(self):
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except ScalarModeError:
            return False
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    @property
    def real(self) -> Fraction:
        return Fraction(int(self.re.numerator), int(self.re.denominator))

    @property
    def imag(self) -> Fraction:
        return Fraction(int(self.im.numerator), int(self.im.denominator))

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def exact(re=0, im=0) -> GaussianRational:
    """Shorthand constructor; accepts ints, fractions and decimal strings."""
    if isinstance(re, GaussianRational) and not im:
        return re
    return GaussianRational(re, im)


def parse_pair(pair) -> GaussianRational:
    """Parse ``[re, im]`` decimal strings exactly (never via float)."""
    if len(pair) != 2:
        raise ValueError(f"expected [re, im], got {pair!r}")
    re, im = pair
    for part in (re, im):
        if isinstance(part, float):
            raise ScalarModeError("matrix entries must be decimal strings, not floats")
    return GaussianRational(str(re), str(im))


def mode_of(value) -> str:
    if isinstance(value, GaussianRational) or isinstance(value, _RATIONAL_TYPES):
        return EXACT
    if isinstance(value, (float, complex)):
        return FLOAT
    raise TypeError(f"not a scalar: {value!r}")


def to_mode(value, mode: str):
    """Convert a rational/exact value into ``mode``; floats cannot become exact."""
    if mode == EXACT:
        return exact(value) if not isinstance(value, GaussianRational) else value
    if mode == FLOAT:
        return complex(value)
    raise ValueError(f"unknown scalar mode {mode!r}")


def conj(value):
    if isinstance(value, (GaussianRational, complex, float)):
        return value.conjugate()
    return value


def is_zero(value) -> bool:
    return not value


def to_complex(value) -> complex:
    return complex(value)
