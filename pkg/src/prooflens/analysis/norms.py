"""Certified norms, integrals and the two Markov-type inequalities.

The exact route rewrites an expression as a piecewise polynomial and splits
at isolated roots; the result is an exact value whenever every root met is
rational, and a narrow enclosure otherwise.  Expressions that cannot be
rewritten (an ``Abs`` over an irrational sign change) fall back to panel
quadrature and grid sampling certified by the derived modulus.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import TheoremViolation
from ..rational import Enclosure, RationalLike, to_q
from .funexpr import (
    PL,
    FunExpr,
    NotPiecewiseExact,
    Poly,
    derived_modulus,
    to_piecewise,
)
from .modulus import Modulus
from .polynomial import Polynomial, RootBracket, isolate_roots, refine_bracket

ZERO = Fraction(0)
ONE = Fraction(1)


def _pow2_at_least(x: Fraction) -> int:
    n = 1
    while n < x:
        n *= 2
    return n


# ---------------------------------------------------------------------------
# Single polynomial pieces


def _brackets(p: Polynomial, a: Fraction, b: Fraction, width: Fraction) -> list[RootBracket]:
    return isolate_roots(p, a, b, width)


def _abs_integral_from(p: Polynomial, a: Fraction, b: Fraction, brs: list[RootBracket]) -> Enclosure:
    big = p.antiderivative()
    lo = hi = ZERO
    cuts: list[tuple[Fraction, Fraction]] = []
    prev = a
    for br in brs:
        cuts.append((prev, br.lo))
        if not br.exact:
            inner = abs(big(br.hi) - big(br.lo))
            rng = p.range_on(br.lo, br.hi)
            m = max(abs(rng.lo), abs(rng.hi))
            lo += inner
            hi += max(inner, br.width * m)
        prev = br.hi
    cuts.append((prev, b))
    for u, v in cuts:
        if u < v:
            s = abs(big(v) - big(u))
            lo += s
            hi += s
    return Enclosure(lo, hi)


def abs_integral_poly(p: Polynomial, a: RationalLike = 0, b: RationalLike = 1,
                      tol: RationalLike = Fraction(1, 1 << 20)) -> Enclosure:
    """Enclosure of the integral of |p| over [a, b] with width <= tol."""
    a, b, tol = to_q(a), to_q(b), to_q(tol)
    if p.is_zero() or a == b:
        return Enclosure(ZERO, ZERO)
    width = tol
    brs = _brackets(p, a, b, width)
    while True:
        enc = _abs_integral_from(p, a, b, brs)
        if enc.width <= tol:
            return enc
        width /= 16
        brs = [refine_bracket(p, br, width) for br in brs]


def sup_abs_poly(p: Polynomial, a: RationalLike = 0, b: RationalLike = 1,
                 tol: RationalLike = Fraction(1, 1 << 20)) -> Enclosure:
    """Enclosure of max |p| over [a, b] with width <= tol."""
    a, b, tol = to_q(a), to_q(b), to_q(tol)
    exact = [abs(p(a)), abs(p(b))]
    d = p.derivative()
    if d.is_zero() or a == b:
        return Enclosure.exact(max(exact))
    width = tol
    brs = _brackets(d, a, b, width)
    while True:
        lo_vals = list(exact)
        hi_vals: list[Fraction] = []
        for br in brs:
            if br.exact:
                lo_vals.append(abs(p(br.lo)))
            else:
                lo_vals.extend((abs(p(br.lo)), abs(p(br.hi))))
                rng = p.range_on(br.lo, br.hi)
                hi_vals.append(max(abs(rng.lo), abs(rng.hi)))
        lo = max(lo_vals)
        hi = max([lo] + hi_vals)
        if hi - lo <= tol:
            return Enclosure(lo, hi)
        width /= 16
        brs = [refine_bracket(d, br, width) for br in brs]


# ---------------------------------------------------------------------------
# Expressions


def l1_norm(e: FunExpr, tol: RationalLike = Fraction(1, 1024)) -> Enclosure:
    """Enclosure of the integral of |e| over [0,1], of width <= tol."""
    tol = to_q(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    try:
        pw = to_piecewise(e)
    except NotPiecewiseExact:
        return l1_norm_quadrature(e, tol)
    share = tol / len(pw.pieces)
    total = Enclosure(ZERO, ZERO)
    for a, b, p in pw.pieces:
        total = total + abs_integral_poly(p, a, b, share)
    return total


def sup_norm(e: FunExpr, tol: RationalLike = Fraction(1, 1024)) -> Enclosure:
    """Enclosure of sup |e| over [0,1], of width <= tol."""
    tol = to_q(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    try:
        pw = to_piecewise(e)
    except NotPiecewiseExact:
        return sup_norm_grid(e, tol)
    encs = [sup_abs_poly(p, a, b, tol) for a, b, p in pw.pieces]
    return Enclosure(max(x.lo for x in encs), max(x.hi for x in encs))


def integral(e: FunExpr, lo: RationalLike = 0, hi: RationalLike = 1,
             tol: RationalLike = Fraction(1, 1024)) -> Enclosure:
    """Enclosure of the signed integral of ``e`` over [lo, hi]."""
    lo, hi, tol = to_q(lo), to_q(hi), to_q(tol)
    if lo >= hi:
        return Enclosure(ZERO, ZERO)
    try:
        return Enclosure.exact(to_piecewise(e).integral(lo, hi))
    except NotPiecewiseExact:
        return _midpoint(e, lo, hi, tol, absolute=False)


def _midpoint(e: FunExpr, lo: Fraction, hi: Fraction, tol: Fraction, absolute: bool,
              modulus: Modulus | None = None) -> Enclosure:
    # Each panel of width w deviates from its midpoint value by less than the
    # eps at which the modulus reaches w/2; for a Lipschitz-c modulus that is c*w/2.
    lip = (modulus or derived_modulus(e)).lipschitz()
    span = hi - lo
    n = _pow2_at_least(lip * span * span / (2 * tol))
    w = span / n
    total = ZERO
    for k in range(n):
        v = e.eval(lo + (2 * k + 1) * w / 2)
        total += abs(v) if absolute else v
    total *= w
    err = lip * w * span / 2
    low = total - err
    if absolute:
        low = max(low, ZERO)
    return Enclosure(low, total + err)


def l1_norm_quadrature(e: FunExpr, tol: RationalLike, modulus: Modulus | None = None) -> Enclosure:
    """Midpoint-panel enclosure of the L1 norm certified by a modulus."""
    return _midpoint(e, ZERO, ONE, to_q(tol), absolute=True, modulus=modulus)


def sup_norm_grid(e: FunExpr, tol: RationalLike, modulus: Modulus | None = None) -> Enclosure:
    """Grid enclosure of the sup norm: every point of [0,1] lies within half a
    grid step of a grid point, so the modulus bounds the excess."""
    tol = to_q(tol)
    lip = (modulus or derived_modulus(e)).lipschitz()
    n = _pow2_at_least(lip / (2 * tol))
    best = max(abs(e.eval(Fraction(k, n))) for k in range(n + 1))
    return Enclosure(best, best + lip / (2 * n))


class UnsupportedShape(ValueError):
    pass


def sign_partition(g: FunExpr, width: Fraction) -> tuple[list[tuple[Fraction, Fraction, int]], list[RootBracket]]:
    """Split [0,1] into sign-definite segments of ``g`` plus small brackets
    around irrational roots.  ``g`` must be PL or a polynomial of degree <= 3."""
    if isinstance(g, PL):
        pieces = g.f.pieces()
    elif isinstance(g, Poly):
        if g.p.degree > 3:
            raise UnsupportedShape("sign partitions need a polynomial of degree <= 3")
        pieces = [(ZERO, ONE, g.p)]
    else:
        raise UnsupportedShape("sign partitions need a PL function or a polynomial")
    segs: list[tuple[Fraction, Fraction, int]] = []
    brackets: list[RootBracket] = []
    for a, b, p in pieces:
        if p.is_zero():
            segs.append((a, b, 0))
            continue
        prev = a
        for br in isolate_roots(p, a, b, width):
            if prev < br.lo:
                segs.append((prev, br.lo, _sign(p((prev + br.lo) / 2))))
            if not br.exact:
                brackets.append(br)
            prev = br.hi
        if prev < b:
            segs.append((prev, b, _sign(p((prev + b) / 2))))
    return segs, brackets


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def sgn_integral(g: FunExpr, h: FunExpr, tol: RationalLike = Fraction(1, 1024)) -> Enclosure:
    """Enclosure of the integral of ``h * sgn(g)`` over [0,1]."""
    tol = to_q(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    h_sup = sup_norm(h, ONE).hi
    width = tol / 4
    while True:
        segs, brackets = sign_partition(g, width)
        share = tol / (2 * max(len(segs), 1))
        total = Enclosure(ZERO, ZERO)
        for a, b, s in segs:
            if s:
                total = total + integral(h, a, b, share).scale(Fraction(s))
        slack = sum((br.width for br in brackets), ZERO) * h_sup
        enc = Enclosure(total.lo - slack, total.hi + slack)
        if enc.width <= tol:
            return enc
        width /= 16


# ---------------------------------------------------------------------------
# Markov-type inequalities


@dataclass(frozen=True)
class MarkovCertificate:
    """``holds`` is True iff ``lhs.hi <= rhs.lo`` was certified."""

    holds: bool
    lhs: Enclosure
    rhs: Enclosure
    n: int

    def __bool__(self) -> bool:
        return self.holds


def _decide(what: str, p: Polynomial, lhs: Enclosure, rhs: Enclosure) -> bool | None:
    if lhs.hi <= rhs.lo:
        return True
    if lhs.lo > rhs.hi:
        raise TheoremViolation(what, p=str(p), lhs=str(lhs), rhs=str(rhs))
    return None


def _sup_abs_fast(p: Polynomial) -> Fraction | None:
    # exact max |p| on [0,1] for degree <= 2
    cs = p.trimmed
    if len(cs) <= 1:
        return abs(cs[0]) if cs else ZERO
    vals = [abs(p(ZERO)), abs(p(ONE))]
    if len(cs) == 3:
        v = -cs[1] / (2 * cs[2])
        if 0 < v < 1:
            vals.append(abs(p(v)))
    elif len(cs) > 3:
        return None
    return max(vals)


def _integer_quadratic(p: Polynomial) -> tuple[int, int, int, int] | None:
    """``(D, A, B, C)`` with ``D * p = A + B x + C x^2`` in integers, or None
    above degree 2.  Both Markov inequalities are homogeneous in ``p``, so
    they can be decided on the integer multiple."""
    cs = p.trimmed
    if len(cs) > 3:
        return None
    cs = list(cs) + [ZERO] * (3 - len(cs))
    d = 1
    for c in cs:
        d = d * c.denominator // _gcd(d, c.denominator)
    return d, *(int(c * d) for c in cs)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _int_sup(a: int, b: int, c: int) -> tuple[int, int]:
    """max |a + b x + c x^2| on [0,1] as a fraction (num, den), den > 0."""
    best_n, best_d = max(abs(a), abs(a + b + c)), 1
    if c != 0:
        # vertex -b/(2c) strictly inside (0,1)
        inside = (0 < -b < 2 * c) if c > 0 else (0 < b < -2 * c)
        if inside:
            vn, vd = abs(4 * a * c - b * b), 4 * abs(c)
            if vn * best_d > best_n * vd:
                best_n, best_d = vn, vd
    return best_n, best_d


def markov_derivative_check(p: Polynomial, max_refinements: int = 12) -> MarkovCertificate:
    """Certify sup|p'| <= 2 n^2 sup|p| on [0,1], with ``n = p.n``."""
    n = p.n
    factor = 2 * n * n
    iq = _integer_quadratic(p)
    if iq is not None:
        d, a, b, c = iq
        dl = max(abs(b), abs(b + 2 * c))
        sn, sd = _int_sup(a, b, c)
        lhs, rhs = Enclosure.exact(Fraction(dl, d)), Enclosure.exact(Fraction(factor * sn, sd * d))
        ok = _decide("Markov derivative bound", p, lhs, rhs)
        return MarkovCertificate(bool(ok), lhs, rhs, n)
    tol = Fraction(1, 1024)
    for _ in range(max_refinements):
        lhs = sup_abs_poly(p.derivative(), 0, 1, tol)
        rhs = sup_abs_poly(p, 0, 1, tol).scale(Fraction(factor))
        ok = _decide("Markov derivative bound", p, lhs, rhs)
        if ok is not None:
            return MarkovCertificate(True, lhs, rhs, n)
        tol /= 16
    return MarkovCertificate(False, lhs, rhs, n)


def _l1_lower_panels(p: Polynomial, panels: int = 4) -> Fraction:
    big = p.antiderivative()
    vals = [big(Fraction(k, panels)) for k in range(panels + 1)]
    return sum((abs(b - a) for a, b in zip(vals, vals[1:])), ZERO)


def markov_l1_check(p: Polynomial, max_refinements: int = 12) -> MarkovCertificate:
    """Certify sup|p| <= 2 (n+1)^2 ||p||_1 on [0,1], with ``n = p.n``."""
    n = p.n
    factor = Fraction(2 * (n + 1) ** 2)
    iq = _integer_quadratic(p)
    if iq is not None:
        d, a, b, c = iq
        sn, sd = _int_sup(a, b, c)
        # 384 * antiderivative at k/4, and the four-panel lower bound for ||d p||_1
        q = [96 * a * k + 12 * b * k * k + 2 * c * k**3 for k in range(5)]
        s384 = sum(abs(v - u) for u, v in zip(q, q[1:]))
        if 384 * sn <= 2 * (n + 1) ** 2 * s384 * sd:
            # ||p||_1 lies between the panel lower bound and sup|p|
            lb, sup = Fraction(s384, 384 * d), Fraction(sn, sd * d)
            rhs = Enclosure(factor * lb, factor * max(lb, sup))
            return MarkovCertificate(True, Enclosure.exact(sup), rhs, n)
    tol = Fraction(1, 1024)
    for _ in range(max_refinements):
        lhs = sup_abs_poly(p, 0, 1, tol)
        rhs = abs_integral_poly(p, 0, 1, tol).scale(factor)
        ok = _decide("Markov L1 bound", p, lhs, rhs)
        if ok is not None:
            return MarkovCertificate(True, lhs, rhs, n)
        tol /= 16
    return MarkovCertificate(False, lhs, rhs, n)
