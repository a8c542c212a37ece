"""Exact Gaussian rationals: the coefficient field Q(i)."""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Union

__all__ = ["GaussianRational", "I", "ZERO", "ONE", "as_scalar", "ScalarLike"]

_FZERO = Fraction(0)
_FONE = Fraction(1)


class GaussianRational:
    """Immutable ``re + im*i`` with ``re`` and ``im`` held as reduced Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if not isinstance(re, Fraction):
            re = _to_fraction(re)
        if not isinstance(im, Fraction):
            im = _to_fraction(im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # -- predicates ---------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self) -> "GaussianRational":
        return self

    def __add__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        if not self.im and not other.im:
            return GaussianRational._raw(self.re + other.re, _FZERO)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        if not self.im and not other.im:
            return GaussianRational._raw(self.re - other.re, _FZERO)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "GaussianRational":
        return (-self).__add__(other)

    def __mul__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational._raw(a * c, _FZERO)
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        if not self.im:
            return GaussianRational._raw(1 / self.re, _FZERO)
        norm = self.re * self.re + self.im * self.im
        return GaussianRational._raw(self.re / norm, -self.im / norm)

    def __truediv__(self, other) -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "GaussianRational":
        return as_scalar(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussianRational":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared modulus, exact."""
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    # -- text ---------------------------------------------------------------

    def to_pair(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_pair(cls, pair) -> "GaussianRational":
        re, im = pair
        return cls(Fraction(re), Fraction(im))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"({self.re} {sign} {_imag_str(abs(self.im))})"

    def __repr__(self) -> str:
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"


def _imag_str(v: Fraction) -> str:
    if v == 1:
        return "I"
    if v == -1:
        return "-I"
    return f"{v}*I"


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        return Fraction(int(v))
    if isinstance(v, (int, str)):
        return Fraction(v)
    if isinstance(v, float):
        # exact binary value of the float; callers wanting decimals pass strings
        return Fraction(v)
    if isinstance(v, numbers.Rational):
        return Fraction(v.numerator, v.denominator)
    raise TypeError(f"cannot convert {type(v).__name__} to an exact rational")


ScalarLike = Union[GaussianRational, int, Fraction, complex, str]


def as_scalar(v) -> GaussianRational:
    """Coerce ints, Fractions, strings like ``"3/2 - I"``, exact-valued complex numbers and ``[re, im]`` pairs."""
    if isinstance(v, GaussianRational):
        return v
    if isinstance(v, complex):
        return GaussianRational(Fraction(v.real), Fraction(v.imag))
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return GaussianRational.from_pair(v)
    if isinstance(v, str) and "I" in v:
        from .polynomial import parse_polynomial

        return parse_polynomial(v, ()).constant_term()
    if isinstance(v, (int, Fraction, str, float)) or isinstance(v, numbers.Rational):
        return GaussianRational._raw(_to_fraction(v), _FZERO)
    raise TypeError(f"cannot convert {type(v).__name__} to GaussianRational")


ZERO = GaussianRational._raw(_FZERO, _FZERO)
ONE = GaussianRational._raw(_FONE, _FZERO)
I = GaussianRational._raw(_FZERO, _FONE)
