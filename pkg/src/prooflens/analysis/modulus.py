"""Moduli of uniform continuity and their combinators.

A modulus ``w`` promises: ``|x - y| < w(eps)`` implies ``|f(x) - f(y)| < eps``.
Expressions are built from three node types; every expression simplifies to
a single :class:`Linear` node, i.e. a Lipschitz constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..rational import RationalLike, fmt, parse_rational, to_q


class Modulus:
    __slots__ = ()

    def __call__(self, eps: RationalLike) -> Fraction:
        eps = to_q(eps)
        if eps <= 0:
            raise ValueError("a modulus is evaluated at positive arguments only")
        return self._eval(eps)

    def _eval(self, eps: Fraction) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def simplify(self) -> "Linear":
        raise NotImplementedError

    def lipschitz(self) -> Fraction:
        """The constant ``c`` with ``w(eps) = eps / c``."""
        return self.simplify().c

    def spec(self) -> str:
        """Text form in the ``linear:`` / ``min:`` / ``pre:`` mini-language."""
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec()


@dataclass(frozen=True)
class Linear(Modulus):
    """``w(eps) = eps / c``: the modulus of a ``c``-Lipschitz function."""

    c: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", to_q(self.c))
        if self.c <= 0:
            raise ValueError("Linear modulus needs a positive constant")

    def _eval(self, eps: Fraction) -> Fraction:
        return eps / self.c

    def simplify(self) -> "Linear":
        return self

    def spec(self) -> str:
        return f"linear:{fmt(self.c)}"


@dataclass(frozen=True)
class MinOf(Modulus):
    parts: tuple[Modulus, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("MinOf needs at least one modulus")

    def _eval(self, eps: Fraction) -> Fraction:
        return min(p._eval(eps) for p in self.parts)

    def simplify(self) -> Linear:
        return Linear(max(p.simplify().c for p in self.parts))

    def spec(self) -> str:
        return "min:(" + ",".join(p.spec() for p in self.parts) + ")"


@dataclass(frozen=True)
class Precomposed(Modulus):
    """``w(eps) = inner(scale * eps)``."""

    scale: Fraction
    inner: Modulus

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", to_q(self.scale))
        if self.scale <= 0:
            raise ValueError("precomposition scale must be positive")

    def _eval(self, eps: Fraction) -> Fraction:
        return self.inner._eval(self.scale * eps)

    def simplify(self) -> Linear:
        return Linear(self.inner.simplify().c / self.scale)

    def spec(self) -> str:
        return f"pre:{fmt(self.scale)}:({self.inner.spec()})"


TRIVIAL = Linear(Fraction(1))
"""Valid for every constant function."""


def modulus_abs(w: Modulus) -> Modulus:
    """A modulus of ``f`` is also one of ``|f|``."""
    return w


def modulus_scale(w: Modulus, c: RationalLike) -> Modulus:
    """Modulus of ``c * f``: ``eps -> w(eps / |c|)``.  ``c = 0`` is rejected;
    the scaled function is constant and :data:`TRIVIAL` is the caller's choice."""
    c = to_q(c)
    if c == 0:
        raise ValueError("scaling by zero gives a constant function; use TRIVIAL")
    if abs(c) == 1:
        return w
    return Precomposed(1 / abs(c), w)


def modulus_sum(w1: Modulus, w2: Modulus) -> Modulus:
    half = Fraction(1, 2)
    return MinOf((Precomposed(half, w1), Precomposed(half, w2)))


def modulus_sum3(w1: Modulus, w2: Modulus, w3: Modulus) -> Modulus:
    third = Fraction(1, 3)
    return MinOf((Precomposed(third, w1), Precomposed(third, w2), Precomposed(third, w3)))


def poly_modulus(n: int, f_l1: RationalLike) -> Linear:
    """Modulus shared by every degree-``n`` polynomial whose L1 norm is at
    most twice ``f_l1``: Lipschitz constant ``4 n^2 (n+1)^2 f_l1``."""
    f_l1 = to_q(f_l1)
    if n < 1:
        raise ValueError("poly_modulus needs n >= 1")
    if f_l1 <= 0:
        raise ValueError("poly_modulus needs a positive L1 bound")
    return Linear(4 * n * n * (n + 1) ** 2 * f_l1)


# ---------------------------------------------------------------------------
# Mini-language:  linear:c | min:(spec,spec,...) | pre:c:(spec)

_RAT = r"[+-]?\d+(?:/\d+)?"


class ModulusSpecError(ValueError):
    pass


def parse_modulus(text: str) -> Modulus:
    s = text.strip()
    m, rest = _parse_mod(s, 0)
    if rest != len(s):
        raise ModulusSpecError(f"trailing input in modulus spec at offset {rest}: {s!r}")
    return m


def _parse_mod(s: str, i: int) -> tuple[Modulus, int]:
    if s.startswith("linear:", i):
        m = re.compile(_RAT).match(s, i + 7)
        if not m:
            raise ModulusSpecError(f"expected a rational after 'linear:' at offset {i + 7}")
        try:
            return Linear(parse_rational(m.group(0))), m.end()
        except ValueError as exc:
            raise ModulusSpecError(str(exc)) from None
    if s.startswith("min:(", i):
        j = i + 5
        parts = []
        while True:
            part, j = _parse_mod(s, j)
            parts.append(part)
            if j < len(s) and s[j] == ",":
                j += 1
                continue
            if j < len(s) and s[j] == ")":
                return MinOf(tuple(parts)), j + 1
            raise ModulusSpecError(f"expected ',' or ')' at offset {j}")
    if s.startswith("pre:", i):
        m = re.compile(_RAT).match(s, i + 4)
        if not m or not s.startswith(":(", m.end()):
            raise ModulusSpecError(f"expected 'pre:c:(spec)' at offset {i}")
        inner, j = _parse_mod(s, m.end() + 2)
        if j >= len(s) or s[j] != ")":
            raise ModulusSpecError(f"expected ')' at offset {j}")
        try:
            return Precomposed(parse_rational(m.group(0)), inner), j + 1
        except ValueError as exc:
            raise ModulusSpecError(str(exc)) from None
    raise ModulusSpecError(f"unknown modulus form at offset {i}: {s[i:]!r}")
