"""Certificates for the quantitative lemmas behind the modulus of uniqueness
for best L1 polynomial approximation.

Every check here is three-valued (:class:`Status`).  A hypothesis that cannot
be certified by the enclosures yields ``INCONCLUSIVE``; a certified
hypothesis together with a certified-false conclusion contradicts a theorem
and raises :class:`TheoremViolation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .analysis import (
    Abs,
    FunExpr,
    Linear,
    Modulus,
    Polynomial,
    Poly,
    Scale,
    derived_modulus,
    l1_norm,
    modulus_abs,
    modulus_scale,
    modulus_sum,
    modulus_sum3,
    poly_modulus,
    sgn_integral,
    sup_norm,
)
from .errors import Status, TheoremViolation
from .rational import Enclosure, RationalLike, fmt, to_q

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_TOL = Fraction(1, 4096)


def _positive(name: str, x: RationalLike) -> Fraction:
    q = to_q(x)
    if q <= 0:
        raise ValueError(f"{name} must be positive, got {q}")
    return q


def _pow2_grid(step: Fraction, floor: int = 1, cap: int = 1 << 22) -> int:
    """Least power of two ``N >= floor`` with ``1/N <= step``."""
    n = 1
    while n < floor or Fraction(1, n) > step:
        n *= 2
        if n > cap:
            raise ValueError(f"grid would need more than {cap} points (step {step})")
    return n


# ---------------------------------------------------------------------------
# Small-value cover


class GridTooCoarse(ValueError):
    pass


@dataclass(frozen=True)
class SmallValueCover:
    """Disjoint intervals covering every x in [0,1] with |g(x)| < zeta.

    Intervals are open relative to [0,1]: an interval starting at 0 also
    contains 0, and one ending at 1 also contains 1.
    """

    g: FunExpr
    zeta: Fraction
    grid_denominator: int
    intervals: tuple[tuple[Fraction, Fraction], ...]

    @property
    def total_measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), ZERO)

    def covers(self, x: RationalLike) -> bool:
        x = to_q(x)
        for a, b in self.intervals:
            if a < x < b or (x == a == 0) or (x == b == 1):
                return True
        return False

    def to_json(self) -> dict[str, Any]:
        return {
            "zeta": fmt(self.zeta),
            "grid_denominator": self.grid_denominator,
            "intervals": [[fmt(a), fmt(b)] for a, b in self.intervals],
            "total_measure": fmt(self.total_measure),
        }


def build_cover(g: FunExpr, zeta: RationalLike, grid_denominator: int = 256) -> SmallValueCover:
    """Cover of {|g| < zeta} by radius-one-step intervals around the grid
    points where |g| < 3*zeta/2.

    Any x with |g(x)| < zeta is within half a grid step of some grid point,
    which is closer than ``omega_g(zeta/2)``; so that point has
    |g| < 3*zeta/2 and its interval contains x.
    """
    zeta = _positive("zeta", zeta)
    n = int(grid_denominator)
    if n < 1:
        raise ValueError("grid denominator must be a positive integer")
    omega = derived_modulus(g)
    if Fraction(1, n) > omega(zeta / 2):
        raise GridTooCoarse(
            f"grid step 1/{n} exceeds omega_g(zeta/2) = {fmt(omega(zeta / 2))}")
    threshold = 3 * zeta / 2
    intervals: list[list[Fraction]] = []
    for k in range(n + 1):
        x = Fraction(k, n)
        if abs(g(x)) < threshold:
            lo, hi = max(ZERO, Fraction(k - 1, n)), min(ONE, Fraction(k + 1, n))
            if intervals and intervals[-1][1] >= lo:
                intervals[-1][1] = hi
            else:
                intervals.append([lo, hi])
    return SmallValueCover(g, zeta, n, tuple((a, b) for a, b in intervals))


# ---------------------------------------------------------------------------
# Reduction lemma


@dataclass(frozen=True)
class ReductionWitness:
    lam: Fraction
    gap: Fraction

    def __post_init__(self) -> None:
        if self.lam == 0 or self.gap <= 0:
            raise ValueError("lambda must be nonzero and the gap positive")


@dataclass(frozen=True)
class ReductionResult:
    status: Status
    witness: ReductionWitness | None
    reason: str = ""
    enclosures: dict[str, Enclosure] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.PASS


def verify_reduction(g: FunExpr, h: FunExpr, eps: RationalLike, zeta: RationalLike,
                     K: RationalLike, B: SmallValueCover, tol: RationalLike = DEFAULT_TOL,
                     max_refinements: int = 4) -> ReductionResult:
    """Certify ``||g - (zeta/2K) h||_1 + eps*zeta/2 <= ||g||_1`` after
    certifying the hypotheses on ``h``, ``K`` and the cover ``B``.

    The multiplier takes the sign of ``integral(h sgn g)``: with a negative
    integral the positive multiplier moves away from zero, and it is
    ``-zeta/2K`` that shrinks the norm.
    """
    eps, zeta, K, tol = to_q(eps), to_q(zeta), to_q(K), to_q(tol)
    if eps <= 0 or zeta <= 0 or K <= 0:
        return ReductionResult(Status.INCONCLUSIVE, None, "eps, zeta and K must be positive")
    witness = ReductionWitness(zeta / (2 * K), eps * zeta / 2)
    encs: dict[str, Enclosure] = {}

    def gate(reason: str) -> ReductionResult:
        return ReductionResult(Status.INCONCLUSIVE, witness, reason, encs)

    if B.g != g or B.zeta < zeta:
        return gate("cover was not built for this g and threshold")
    if B.total_measure > eps:
        return gate(f"cover measure {fmt(B.total_measure)} exceeds eps")
    encs["sup_h"] = sup_norm(h, tol)
    if encs["sup_h"].hi > K:
        return gate("sup |h| <= K not certified")
    encs["sgn_integral"] = sgn_integral(g, h, tol)
    if encs["sgn_integral"].abs().lo < 3 * K * eps:
        return gate("|integral of h sgn g| >= 3K eps not certified")
    if encs["sgn_integral"].hi < 0:
        witness = ReductionWitness(-witness.lam, witness.gap)

    lhs_fun = g - Scale(witness.lam, h)
    for _ in range(max_refinements):
        lhs = l1_norm(lhs_fun, tol)
        rhs = l1_norm(g, tol)
        encs["l1_shifted"], encs["l1_g"] = lhs, rhs
        if lhs.hi + witness.gap <= rhs.lo:
            return ReductionResult(Status.PASS, witness, "", encs)
        if lhs.lo + witness.gap > rhs.hi:
            raise TheoremViolation("reduction lemma conclusion certified false",
                                   lhs=str(lhs), rhs=str(rhs), gap=fmt(witness.gap))
        tol /= 16
    return gate("conclusion enclosures overlap at the finest tolerance")


# ---------------------------------------------------------------------------
# Near zeros of the residual


def separation(n: int) -> Fraction:
    """Required spacing ``1/(20 (n+2)^2 n)`` of the near-zero points."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(1, 20 * (n + 2) ** 2 * n)


def near_best_threshold(zeta: Fraction, n: int) -> Fraction:
    """Nearness ``zeta/(20 (n+2)^2)`` under which the near zeros must exist."""
    return zeta / (20 * (n + 2) ** 2)


@dataclass(frozen=True)
class NearZeroCertificate:
    points: tuple[Fraction, ...]
    separation: Fraction
    value_bound: Fraction

    def validate(self, f: FunExpr, p: Polynomial) -> bool:
        """Recheck both invariants exactly."""
        gaps_ok = all(b - a >= self.separation for a, b in zip(self.points, self.points[1:]))
        return gaps_ok and all(abs(f(r) - p(r)) <= self.value_bound for r in self.points)

    def to_json(self) -> dict[str, Any]:
        return {"points": [fmt(r) for r in self.points], "separation": fmt(self.separation),
                "value_bound": fmt(self.value_bound)}


@dataclass(frozen=True)
class NearZeroResult:
    status: Status
    certificate: NearZeroCertificate | None
    found: tuple[Fraction, ...]
    grid_denominator: int
    defect: bool = False


def find_near_zeros(f: FunExpr, p: Polynomial, n: int, zeta: RationalLike,
                    grid_denominator: int | None = None,
                    certified_nearly_best: bool = False) -> NearZeroResult:
    """Greedy left-to-right search for ``n + 1`` grid points, pairwise at
    least the required separation apart, where ``|f - p| <= zeta``.

    The default grid is the coarsest power of two finer than the residual's
    modulus at ``zeta``.  When the caller vouches that ``p`` is nearly best
    at the lemma's threshold, a failure is reported as a defect.
    """
    zeta = _positive("zeta", zeta)
    gamma = separation(n)
    resid = f - Poly(p)
    if grid_denominator is None:
        grid_denominator = _pow2_grid(derived_modulus(resid)(zeta), floor=256)
    N = int(grid_denominator)
    points: list[Fraction] = []
    k = 0
    while k <= N and len(points) < n + 1:
        x = Fraction(k, N)
        if abs(resid(x)) <= zeta:
            points.append(x)
            nxt = x + gamma
            k = -((-nxt.numerator * N) // nxt.denominator)
        else:
            k += 1
    if len(points) == n + 1:
        cert = NearZeroCertificate(tuple(points), gamma, zeta)
        return NearZeroResult(Status.PASS, cert, tuple(points), N)
    return NearZeroResult(Status.FAIL, None, tuple(points), N, defect=certified_nearly_best)


# ---------------------------------------------------------------------------
# Small integral implies small supremum


@dataclass(frozen=True)
class SupResult:
    status: Status
    l1: Enclosure
    bound: Fraction
    sup: Enclosure | None = None

    @property
    def holds(self) -> bool:
        return self.status is Status.PASS


def sup_from_l1(q: FunExpr, omega_q: Modulus, eps: RationalLike,
                tol: RationalLike = DEFAULT_TOL) -> SupResult:
    """Certify ``sup |q| < eps`` from ``||q||_1 < (eps/2) min{1/2, omega_q(eps/2)}``.

    The conclusion is double-checked against a direct sup-norm enclosure.
    """
    eps = _positive("eps", eps)
    bound = eps / 2 * min(Fraction(1, 2), omega_q(eps / 2))
    tol = min(to_q(tol), bound / 4)
    l1 = l1_norm(q, tol)
    if not l1.hi < bound:
        return SupResult(Status.INCONCLUSIVE, l1, bound)
    sup = sup_norm(q, min(to_q(tol), eps / 4))
    if sup.lo >= eps:
        raise TheoremViolation("small integral lemma contradicted by sup enclosure",
                               l1=str(l1), sup=str(sup), eps=fmt(eps))
    return SupResult(Status.PASS, l1, bound, sup)


# ---------------------------------------------------------------------------
# The modulus of uniqueness


@dataclass(frozen=True)
class UniquenessModulus:
    """``Phi_f`` for degree ``n`` from a modulus of f and ``||f||_1``."""

    n: int
    omega_f: Modulus
    f_l1: Fraction

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("the modulus of uniqueness needs n >= 1")
        object.__setattr__(self, "f_l1", to_q(self.f_l1))
        if self.f_l1 <= 0:
            raise ValueError("||f||_1 must be positive")

    @property
    def gamma(self) -> Fraction:
        return separation(self.n)

    def upsilon(self, eps: RationalLike) -> Fraction:
        return _positive("eps", eps) * self.gamma ** self.n / (self.n + 1)

    def zeta(self, eps: RationalLike) -> Fraction:
        n = self.n
        return _positive("eps", eps) / (4 * (n + 1) * 20**n * (n + 2) ** (2 * n) * n**n)

    def rho(self, eps: RationalLike) -> Fraction:
        n, z = self.n, self.zeta(eps)
        return z / 2 * min(Fraction(1, 10 * (n + 2) ** 2),
                           self.omega_f(z / 12),
                           z / (24 * n**2 * (n + 1) ** 2 * self.f_l1))

    def __call__(self, eps: RationalLike) -> Fraction:
        return self.rho(eps)


def uniqueness_modulus(n: int, omega_f: Modulus, f_l1: RationalLike) -> UniquenessModulus:
    return UniquenessModulus(n, omega_f, to_q(f_l1))


def stability_radius(phi: UniquenessModulus, delta: RationalLike) -> Fraction:
    return phi(_positive("delta", delta)) / 2


# ---------------------------------------------------------------------------
# Modulus of the auxiliary function q


def averaged_gap(f: FunExpr, p1: Polynomial, p2: Polynomial) -> FunExpr:
    """``q = |f - p1|/2 + |f - p2|/2 - |f - p|`` with ``p`` the average."""
    mid = (p1 + p2).scale(Fraction(1, 2))
    return (Scale(Fraction(1, 2), Abs(f - Poly(p1))) + Scale(Fraction(1, 2), Abs(f - Poly(p2)))
            - Abs(f - Poly(mid)))


def assembled_q_modulus(n: int, omega_f: Modulus, f_l1: RationalLike) -> Modulus:
    """Modulus of :func:`averaged_gap` built from the combinator lemmas,
    with the Markov-derived modulus for each polynomial."""
    omega_p = poly_modulus(n, f_l1)
    residual = modulus_sum(omega_f, modulus_scale(omega_p, -1))
    half = modulus_scale(modulus_abs(residual), Fraction(1, 2))
    whole = modulus_scale(modulus_abs(residual), -1)
    return modulus_sum3(half, half, whole)


def displayed_q_modulus(n: int, omega_f: Modulus, f_l1: RationalLike):
    """The closed form ``min{omega_f(d/6), d/(12 n^2 (n+1)^2 ||f||_1)}``."""
    f_l1 = to_q(f_l1)

    def omega(delta: RationalLike) -> Fraction:
        d = _positive("delta", delta)
        return min(omega_f(d / 6), d / (12 * n**2 * (n + 1) ** 2 * f_l1))

    return omega


def lipschitz_q_modulus(n: int, omega_f: Modulus, f_l1: RationalLike) -> Modulus:
    """A modulus for q valid when f is Lipschitz: |q(x)-q(y)| is at most
    ``2|f(x)-f(y)| + 2L|x-y|`` with L the polynomial Lipschitz bound."""
    c = omega_f.lipschitz()
    L = poly_modulus(n, f_l1).lipschitz()
    return Linear(2 * c + 2 * L)
