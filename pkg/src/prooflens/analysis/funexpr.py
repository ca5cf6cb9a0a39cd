"""Function expressions on [0,1] with exact rational evaluation.

Leaves are piecewise-linear functions and polynomials; internal nodes are
``Abs``, ``Scale`` and ``Sum``.  Every expression has a modulus of uniform
continuity assembled from the combinator lemmas, and most expressions can be
rewritten exactly as a piecewise polynomial.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ..rational import RationalLike, fmt, to_q
from .modulus import TRIVIAL, Linear, Modulus, modulus_abs, modulus_scale, modulus_sum
from .polynomial import Polynomial, isolate_roots

ZERO = Fraction(0)
ONE = Fraction(1)


class DomainError(ValueError):
    """Evaluation point outside [0,1]."""


def _check_x(x: RationalLike) -> Fraction:
    x = to_q(x)
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x} is outside [0,1]")
    return x


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise-linear function through ``points`` (x strictly
    increasing from 0 to 1)."""

    points: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, points: Iterable[Sequence[RationalLike]]):
        pts = tuple((to_q(x), to_q(y)) for x, y in points)
        if len(pts) < 2:
            raise ValueError("a PL function needs at least two breakpoints")
        if pts[0][0] != 0 or pts[-1][0] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a[0] >= b[0] for a, b in zip(pts, pts[1:])):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(p[0] for p in self.points)

    def slopes(self) -> list[Fraction]:
        return [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.points, self.points[1:])]

    def lipschitz(self) -> Fraction:
        return max(abs(s) for s in self.slopes())

    def __call__(self, x: RationalLike) -> Fraction:
        x = _check_x(x)
        xs = self.xs
        i = min(bisect_right(xs, x) - 1, len(xs) - 2)
        (x0, y0), (x1, y1) = self.points[i], self.points[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def pieces(self) -> list[tuple[Fraction, Fraction, Polynomial]]:
        out = []
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            s = (y1 - y0) / (x1 - x0)
            out.append((x0, x1, Polynomial((y0 - s * x0, s), 1)))
        return out


class FunExpr:
    __slots__ = ()

    def __call__(self, x: RationalLike) -> Fraction:
        return self.eval(_check_x(x))

    def eval(self, x: Fraction) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    def __add__(self, other: "FunExpr") -> "FunExpr":
        return Sum(self, other)

    def __sub__(self, other: "FunExpr") -> "FunExpr":
        return Sum(self, Scale(Fraction(-1), other))

    def __neg__(self) -> "FunExpr":
        return Scale(Fraction(-1), self)

    def __rmul__(self, c: RationalLike) -> "FunExpr":
        return Scale(to_q(c), self)

    def modulus(self) -> Modulus:
        return derived_modulus(self)

    def to_json(self) -> dict[str, Any]:
        return funexpr_to_json(self)


@dataclass(frozen=True)
class PL(FunExpr):
    f: PLFunction

    def eval(self, x: Fraction) -> Fraction:
        return self.f(x)


@dataclass(frozen=True)
class Poly(FunExpr):
    p: Polynomial

    def eval(self, x: Fraction) -> Fraction:
        return self.p(x)


@dataclass(frozen=True)
class Abs(FunExpr):
    e: FunExpr

    def eval(self, x: Fraction) -> Fraction:
        return abs(self.e.eval(x))


@dataclass(frozen=True)
class Scale(FunExpr):
    c: Fraction
    e: FunExpr

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", to_q(self.c))

    def eval(self, x: Fraction) -> Fraction:
        return self.c * self.e.eval(x)


@dataclass(frozen=True)
class Sum(FunExpr):
    a: FunExpr
    b: FunExpr

    def eval(self, x: Fraction) -> Fraction:
        return self.a.eval(x) + self.b.eval(x)


# convenience constructors

def poly(*coeffs: RationalLike, n: int | None = None) -> Poly:
    return Poly(Polynomial(coeffs, n))


def pl(*points: Sequence[RationalLike]) -> PL:
    return PL(PLFunction(points))


def const(c: RationalLike) -> Poly:
    return Poly(Polynomial((c,)))


TENT = pl((0, 0), (Fraction(1, 2), 1), (1, 0))


# ---------------------------------------------------------------------------
# Moduli


def derived_modulus(e: FunExpr) -> Modulus:
    """Modulus obtained structurally: Lipschitz constants at the leaves,
    then the abs / scale / sum combinators."""
    if isinstance(e, PL):
        lip = e.f.lipschitz()
        return Linear(lip) if lip > 0 else TRIVIAL
    if isinstance(e, Poly):
        lip = e.p.lipschitz_bound()
        return Linear(lip) if lip > 0 else TRIVIAL
    if isinstance(e, Abs):
        return modulus_abs(derived_modulus(e.e))
    if isinstance(e, Scale):
        if e.c == 0:
            return TRIVIAL
        return modulus_scale(derived_modulus(e.e), e.c)
    if isinstance(e, Sum):
        return modulus_sum(derived_modulus(e.a), derived_modulus(e.b))
    raise TypeError(f"not a function expression: {e!r}")


# ---------------------------------------------------------------------------
# Exact piecewise-polynomial form


class NotPiecewiseExact(ValueError):
    """Raised when an absolute value would split a piece at an irrational point."""


@dataclass(frozen=True)
class PiecewisePoly:
    """Pieces ``(a, b, p)`` with consecutive ``[a, b]`` covering [0,1]; ``p``
    is written in the global variable ``x``."""

    pieces: tuple[tuple[Fraction, Fraction, Polynomial], ...]

    @property
    def breaks(self) -> list[Fraction]:
        return [self.pieces[0][0]] + [b for _, b, _ in self.pieces]

    def eval(self, x: Fraction) -> Fraction:
        for a, b, p in self.pieces:
            if a <= x <= b:
                return p(x)
        raise DomainError(f"x = {x} is outside [0,1]")

    def refine(self, breaks: Sequence[Fraction]) -> "PiecewisePoly":
        """Same function with additional breakpoints."""
        pts = sorted(set(self.breaks) | set(breaks))
        out = []
        k = 0
        for a, b in zip(pts, pts[1:]):
            while not (self.pieces[k][0] <= a and b <= self.pieces[k][1]):
                k += 1
            out.append((a, b, self.pieces[k][2]))
        return PiecewisePoly(tuple(out))

    def combine(self, other: "PiecewisePoly", op) -> "PiecewisePoly":
        pts = sorted(set(self.breaks) | set(other.breaks))
        l, r = self.refine(pts), other.refine(pts)
        return PiecewisePoly(tuple((a, b, op(p, q)) for (a, b, p), (_, _, q) in zip(l.pieces, r.pieces)))

    def scale(self, c: Fraction) -> "PiecewisePoly":
        return PiecewisePoly(tuple((a, b, p.scale(c)) for a, b, p in self.pieces))

    def abs(self) -> "PiecewisePoly":
        out = []
        for a, b, p in self.pieces:
            if p.is_zero():
                out.append((a, b, p))
                continue
            cuts = [a]
            for r in isolate_roots(p, a, b):
                if not r.exact:
                    raise NotPiecewiseExact(f"irrational sign change of {p} in [{a}, {b}]")
                if a < r.lo < b:
                    cuts.append(r.lo)
            cuts.append(b)
            for u, v in zip(cuts, cuts[1:]):
                s = p((u + v) / 2)
                out.append((u, v, -p if s < 0 else p))
        return PiecewisePoly(tuple(out))

    def integral(self, lo: Fraction = ZERO, hi: Fraction = ONE) -> Fraction:
        total = Fraction(0)
        for a, b, p in self.pieces:
            u, v = max(a, lo), min(b, hi)
            if u < v:
                total += p.integrate(u, v)
        return total


def to_piecewise(e: FunExpr) -> PiecewisePoly:
    """Exact piecewise-polynomial form of ``e``; raises
    :class:`NotPiecewiseExact` when that would need irrational breakpoints."""
    if isinstance(e, PL):
        return PiecewisePoly(tuple(e.f.pieces()))
    if isinstance(e, Poly):
        return PiecewisePoly(((ZERO, ONE, e.p),))
    if isinstance(e, Abs):
        return to_piecewise(e.e).abs()
    if isinstance(e, Scale):
        return to_piecewise(e.e).scale(e.c)
    if isinstance(e, Sum):
        return to_piecewise(e.a).combine(to_piecewise(e.b), lambda p, q: p + q)
    raise TypeError(f"not a function expression: {e!r}")


def as_polynomial(e: FunExpr) -> Polynomial | None:
    """The polynomial ``e`` equals when it is built from ``Poly``, ``Scale``
    and ``Sum`` only; otherwise ``None``."""
    if isinstance(e, Poly):
        return e.p
    if isinstance(e, Scale):
        p = as_polynomial(e.e)
        return None if p is None else p.scale(e.c)
    if isinstance(e, Sum):
        p, q = as_polynomial(e.a), as_polynomial(e.b)
        return None if p is None or q is None else p + q
    return None


# ---------------------------------------------------------------------------
# JSON function spec


class FunSpecError(ValueError):
    pass


def funexpr_from_json(obj: Any) -> FunExpr:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FunSpecError("function spec must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "pl":
            return PL(PLFunction([(to_q(x), to_q(y)) for x, y in obj["points"]]))
        if kind == "poly":
            return Poly(Polynomial([to_q(c) for c in obj["coeffs"]], obj.get("n")))
        if kind == "abs":
            return Abs(funexpr_from_json(obj["arg"]))
        if kind == "scale":
            return Scale(to_q(obj["c"]), funexpr_from_json(obj["arg"]))
        if kind == "sum":
            args = [funexpr_from_json(a) for a in obj["args"]]
            if not args:
                raise FunSpecError("sum needs at least one argument")
            out = args[0]
            for a in args[1:]:
                out = Sum(out, a)
            return out
    except (KeyError, TypeError) as exc:
        raise FunSpecError(f"malformed {kind!r} spec: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, FunSpecError):
            raise
        raise FunSpecError(str(exc)) from None
    raise FunSpecError(f"unknown function kind {kind!r}")


def funexpr_to_json(e: FunExpr) -> dict[str, Any]:
    if isinstance(e, PL):
        return {"kind": "pl", "points": [[fmt(x), fmt(y)] for x, y in e.f.points]}
    if isinstance(e, Poly):
        return {"kind": "poly", "coeffs": [fmt(c) for c in e.p.coeffs], "n": e.p.n}
    if isinstance(e, Abs):
        return {"kind": "abs", "arg": funexpr_to_json(e.e)}
    if isinstance(e, Scale):
        return {"kind": "scale", "c": fmt(e.c), "arg": funexpr_to_json(e.e)}
    if isinstance(e, Sum):
        return {"kind": "sum", "args": [funexpr_to_json(e.a), funexpr_to_json(e.b)]}
    raise TypeError(f"not a function expression: {e!r}")
