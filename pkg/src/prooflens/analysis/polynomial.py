"""Exact rational polynomials on [0,1] with root isolation and range bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, NamedTuple, Sequence

from ..rational import Enclosure, RationalLike, to_q


def _trim(cs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """``coeffs[k]`` multiplies ``x**k``; ``n`` is the declared degree bound.

    Trailing zero coefficients are allowed but never more than ``n + 1``
    coefficients in total.
    """

    coeffs: tuple[Fraction, ...]
    n: int

    def __init__(self, coeffs: Iterable[RationalLike] = (), n: int | None = None):
        cs = tuple(to_q(c) for c in coeffs)
        if n is None:
            n = max(len(_trim(cs)) - 1, 0)
        if n < 0:
            raise ValueError("degree bound must be a natural number")
        if len(cs) > n + 1:
            if any(c != 0 for c in cs[n + 1:]):
                raise ValueError(f"{len(cs)} coefficients exceed degree bound {n}")
            cs = cs[: n + 1]
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "n", n)

    @classmethod
    def constant(cls, c: RationalLike, n: int = 0) -> "Polynomial":
        return cls((c,), n)

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls((0, 1))

    # structure
    @property
    def trimmed(self) -> tuple[Fraction, ...]:
        return _trim(self.coeffs)

    @property
    def degree(self) -> int:
        """Actual degree; ``-1`` for the zero polynomial."""
        return len(self.trimmed) - 1

    def is_zero(self) -> bool:
        return self.degree < 0

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.trimmed == other.trimmed and self.n == other.n

    def __hash__(self) -> int:
        return hash((self.trimmed, self.n))

    def same_function(self, other: "Polynomial") -> bool:
        return self.trimmed == other.trimmed

    def with_bound(self, n: int) -> "Polynomial":
        return Polynomial(self.trimmed, n)

    # evaluation
    def __call__(self, x: RationalLike) -> Fraction:
        x = to_q(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # arithmetic
    def __add__(self, other: "Polynomial") -> "Polynomial":
        m = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coeff(k) + other.coeff(k) for k in range(m)], max(self.n, other.n))

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs], self.n)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: RationalLike) -> "Polynomial":
        c = to_q(c)
        return Polynomial([c * a for a in self.coeffs], self.n)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.trimmed, other.trimmed
        out = [Fraction(0)] * max(len(a) + len(b) - 1, 0)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return Polynomial(out, self.n + other.n)

    def derivative(self) -> "Polynomial":
        cs = [k * c for k, c in enumerate(self.coeffs)][1:]
        return Polynomial(cs, max(self.n - 1, 0))

    def antiderivative(self) -> "Polynomial":
        return Polynomial([Fraction(0)] + [c / (k + 1) for k, c in enumerate(self.coeffs)], self.n + 1)

    def integrate(self, a: RationalLike = 0, b: RationalLike = 1) -> Fraction:
        big = self.antiderivative()
        return big(b) - big(a)

    def taylor(self, c: Fraction) -> list[Fraction]:
        """Coefficients of ``t -> p(c + t)``."""
        cs = self.trimmed
        out = [Fraction(0)] * len(cs)
        for k, a in enumerate(cs):
            if a == 0:
                continue
            pw = Fraction(1)
            for j in range(k, -1, -1):
                # term a * C(k, j) * c^(k-j) * t^j
                out[j] += a * comb(k, j) * pw
                pw *= c
        return out

    def range_on(self, a: Fraction, b: Fraction) -> Enclosure:
        """Certified enclosure of ``{p(x) : x in [a, b]}``, from the Taylor
        expansion at the midpoint.  Tight when ``b - a`` is small."""
        c = (a + b) / 2
        r = (b - a) / 2
        t = self.taylor(c)
        if not t:
            return Enclosure(Fraction(0), Fraction(0))
        slack = Fraction(0)
        pw = Fraction(1)
        for d in t[1:]:
            pw *= r
            slack += abs(d) * pw
        return Enclosure(t[0] - slack, t[0] + slack)

    def lipschitz_bound(self) -> Fraction:
        """Upper bound for sup |p'| on [0,1]: the sum of k|c_k|."""
        return sum((k * abs(c) for k, c in enumerate(self.coeffs)), Fraction(0))

    def __str__(self) -> str:
        cs = self.trimmed
        if not cs:
            return "0"
        terms = []
        for k, c in enumerate(cs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Division, gcd, Sturm chains


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a, b = list(_trim(a)), list(_trim(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        f = a[-1] / lead
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        a = list(_trim(a))
    return q, a


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = list(_trim(a)), list(_trim(b))
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def squarefree(cs: Sequence[Fraction]) -> list[Fraction]:
    cs = list(_trim(cs))
    if len(cs) <= 2:
        return cs
    d = [k * c for k, c in enumerate(cs)][1:]
    g = poly_gcd(cs, d)
    if len(g) <= 1:
        return cs
    q, _ = poly_divmod(cs, g)
    return q


def _evaluate(cs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def sturm_chain(cs: Sequence[Fraction]) -> list[list[Fraction]]:
    p0 = list(_trim(cs))
    p1 = list(_trim([k * c for k, c in enumerate(p0)][1:]))
    chain = [p0]
    if p1:
        chain.append(p1)
    while len(chain) >= 2 and len(chain[-1]) > 1:
        _, r = poly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _variations(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _evaluate(p, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots(chain: list[list[Fraction]], a: Fraction, b: Fraction) -> int:
    """Distinct real roots in (a, b] of the square-free head of ``chain``."""
    return _variations(chain, a) - _variations(chain, b)


def simplest_between(a: Fraction, b: Fraction | None) -> Fraction:
    """Rational with the smallest denominator in the open interval (a, b);
    ``b=None`` stands for +infinity."""
    if b is not None and a >= b:
        raise ValueError("empty interval")
    k = a.numerator // a.denominator + 1  # least integer > a
    if b is None or k < b:
        return Fraction(k)
    fl = k - 1
    u, v = a - fl, b - fl  # 0 <= u < v <= 1
    inner = simplest_between(1 / v, None if u == 0 else 1 / u)
    return fl + 1 / inner


class RootBracket(NamedTuple):
    """Interval containing exactly one distinct root; ``lo == hi`` for an
    exactly known rational root."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def rational_roots_quadratic(cs: Sequence[Fraction]) -> list[Fraction] | None:
    """Exact roots of a degree <= 2 polynomial when they are rational
    (``None`` if they are irrational, ``[]`` if there are no real roots)."""
    cs = _trim(cs)
    if len(cs) <= 1:
        return []
    if len(cs) == 2:
        return [-cs[0] / cs[1]]
    c, b, a = cs
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = _exact_sqrt(disc)
    if s is None:
        return None
    roots = sorted({(-b - s) / (2 * a), (-b + s) / (2 * a)})
    return roots


def _isqrt_exact(k: int) -> int | None:
    from math import isqrt

    r = isqrt(k)
    return r if r * r == k else None


def _exact_sqrt(q: Fraction) -> Fraction | None:
    n = _isqrt_exact(q.numerator)
    d = _isqrt_exact(q.denominator)
    if n is None or d is None:
        return None
    return Fraction(n, d)


def isolate_roots(p: Polynomial | Sequence[Fraction], lo: Fraction = Fraction(0), hi: Fraction = Fraction(1),
                  width: Fraction = Fraction(1, 1 << 20)) -> list[RootBracket]:
    """All distinct real roots of ``p`` in the closed interval [lo, hi].

    Rational roots are found exactly whenever they are the simplest rational
    of some bracket met during bisection (in particular every rational root
    of a polynomial of degree <= 2); the others are returned as brackets of
    width at most ``width``.  The zero polynomial is rejected.
    """
    cs = p.trimmed if isinstance(p, Polynomial) else _trim([to_q(c) for c in p])
    lo, hi = to_q(lo), to_q(hi)
    if not cs:
        raise ValueError("the zero polynomial has no isolated roots")
    if len(cs) == 1:
        return []
    quad = rational_roots_quadratic(cs) if len(cs) <= 3 else None
    if quad is not None:
        return [RootBracket(r, r) for r in quad if lo <= r <= hi]
    sq = squarefree(cs)
    chain = sturm_chain(sq)
    out: list[RootBracket] = []
    if _evaluate(sq, lo) == 0:
        out.append(RootBracket(lo, lo))
    stack = [(lo, hi, count_roots(chain, lo, hi))]
    found: list[RootBracket] = []
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            found.append(_refine(sq, chain, a, b, width))
            continue
        m = (a + b) / 2
        stack.append((a, m, count_roots(chain, a, m)))
        stack.append((m, b, count_roots(chain, m, b)))
    out.extend(found)
    out.sort(key=lambda r: r.lo)
    return out


def _refine(sq: list[Fraction], chain: list[list[Fraction]], a: Fraction, b: Fraction,
            width: Fraction) -> RootBracket:
    # exactly one root in (a, b]
    while True:
        if _evaluate(sq, b) == 0:
            return RootBracket(b, b)
        s = simplest_between(a, b)
        if _evaluate(sq, s) == 0:
            return RootBracket(s, s)
        if b - a <= width:
            return RootBracket(a, b)
        m = (a + b) / 2
        if count_roots(chain, a, m) == 1:
            b = m
        else:
            a = m


def refine_bracket(p: Polynomial, br: RootBracket, width: Fraction) -> RootBracket:
    if br.exact or br.width <= width:
        return br
    sq = squarefree(p.trimmed)
    return _refine(sq, sturm_chain(sq), br.lo, br.hi, width)
