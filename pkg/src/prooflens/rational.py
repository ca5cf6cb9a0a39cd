"""Exact rationals and certified enclosures.

Every numeric quantity in the package is a :class:`fractions.Fraction`.
Reals that can only be bounded (integrals, suprema over a continuum) are
carried as an :class:`Enclosure` ``[lo, hi]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Q = Fraction
RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class RationalFormatError(ValueError):
    """Raised for anything that is not an exact ``p`` or ``p/q`` literal."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; decimals and floats are rejected."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalFormatError(f"not an exact rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalFormatError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def to_q(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def fmt(q: Fraction) -> str:
    """Canonical ``p/q`` string (``p`` when the denominator is 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Enclosure:
    """A certified interval: the real quantity it stands for lies in [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Fraction) -> "Enclosure":
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def __add__(self, other: "Enclosure | Fraction | int") -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi)
        return Enclosure(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other: "Enclosure | Fraction | int") -> "Enclosure":
        return self + (-other)

    def scale(self, c: Fraction) -> "Enclosure":
        a, b = self.lo * c, self.hi * c
        return Enclosure(min(a, b), max(a, b))

    def abs(self) -> "Enclosure":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.lo, self.hi))

    def to_json(self) -> dict[str, str]:
        return {"lo": fmt(self.lo), "hi": fmt(self.hi)}

    def __str__(self) -> str:
        if self.lo == self.hi:
            return f"[{fmt(self.lo)}]"
        return f"[{fmt(self.lo)}, {fmt(self.hi)}]"
