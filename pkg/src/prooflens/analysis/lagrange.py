"""Lagrange interpolation with exact rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..rational import RationalLike, to_q
from .polynomial import Polynomial


def lagrange(points: Sequence[tuple[RationalLike, RationalLike]], n: int) -> Polynomial:
    """The unique polynomial of degree <= n through the ``n + 1`` points."""
    pts = [(to_q(r), to_q(v)) for r, v in points]
    if len(pts) != n + 1:
        raise ValueError(f"need exactly {n + 1} points for degree {n}, got {len(pts)}")
    nodes = [r for r, _ in pts]
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be pairwise distinct")
    total = Polynomial((), n)
    for i, (ri, vi) in enumerate(pts):
        if vi == 0:
            continue
        basis = Polynomial((1,), 0)
        denom = Fraction(1)
        for j, rj in enumerate(nodes):
            if j != i:
                basis = basis * Polynomial((-rj, 1))
                denom *= ri - rj
        total = total + basis.scale(vi / denom)
    return total.with_bound(n)


def lagrange_sup_bound(v_bound: RationalLike, separation: RationalLike, n: int) -> Fraction:
    """``(n + 1) * v_bound * separation**(-n)``: a bound for sup |L| on [0,1]
    when the n+1 nodes lie in [0,1], pairwise at least ``separation`` apart,
    and every interpolated value is at most ``v_bound`` in magnitude."""
    v, g = to_q(v_bound), to_q(separation)
    if g <= 0:
        raise ValueError("node separation must be positive")
    if v < 0:
        raise ValueError("value bound must be non-negative")
    return (n + 1) * v / g**n
