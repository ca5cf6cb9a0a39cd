"""Brute-force oracles over rational polynomial grids and the check suite.

A grid is every polynomial of degree at most ``n`` whose coefficients are
multiples of ``1/coeff_denominator`` bounded by ``coeff_bound``, restricted
to the certified members with ``||p||_1 <= l1_cap``.  Searches over a grid
are exact branch and bound: a cheap exact lower bound on each distance
(panel integrals, vectorised over the whole grid) orders and prunes the
candidates, and only the survivors get a certified L1 enclosure.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .analysis import (
    TENT,
    FunExpr,
    NotPiecewiseExact,
    Poly,
    Polynomial,
    Scale,
    abs_integral_poly,
    funexpr_from_json,
    funexpr_to_json,
    integral,
    l1_norm,
    markov_derivative_check,
    markov_l1_check,
    parse_modulus,
    poly,
    to_piecewise,
)
from .errors import Status, TheoremViolation
from .jackson import (
    assembled_q_modulus,
    build_cover,
    displayed_q_modulus,
    find_near_zeros,
    stability_radius,
    sup_from_l1,
    uniqueness_modulus,
    verify_reduction,
)
from .rational import Enclosure, RationalLike, fmt, to_q

ZERO = Fraction(0)
DEFAULT_TOL = Fraction(1, 1024)
PANELS = 16
MAX_GRID = 4_000_000


class EmptyGrid(ValueError):
    pass


class GridTooLarge(ValueError):
    pass


class ConfigError(ValueError):
    pass


def thread_count() -> int:
    """Worker processes for the parallel parts; ``PROOFLENS_THREADS`` caps it."""
    n = os.cpu_count() or 1
    env = os.environ.get("PROOFLENS_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            raise ConfigError(f"PROOFLENS_THREADS must be an integer, got {env!r}") from None
    return n


def _parallel_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    """``map`` over disjoint chunks; results come back in input order."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class PolyGrid:
    n: int
    coeff_denominator: int
    coeff_bound: Fraction
    l1_cap: Fraction | None = None
    tol: Fraction = DEFAULT_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff_bound", to_q(self.coeff_bound))
        object.__setattr__(self, "tol", to_q(self.tol))
        if self.l1_cap is not None:
            object.__setattr__(self, "l1_cap", to_q(self.l1_cap))
            if self.l1_cap < 0:
                raise ValueError("l1_cap must be non-negative")
        if self.n < 0 or self.coeff_denominator < 1:
            raise ValueError("degree bound and denominator must be natural, denominator >= 1")
        if self.coeff_bound <= 0 or self.tol <= 0:
            raise ValueError("coefficient bound and tolerance must be positive")

    @classmethod
    def for_function(cls, f: FunExpr, n: int, coeff_denominator: int,
                     coeff_bound: RationalLike = 4, tol: RationalLike = DEFAULT_TOL) -> "PolyGrid":
        """The grid restricted to ``Q_n``: ``l1_cap = 2 ||f||_1`` (upper enclosure)."""
        tol = to_q(tol)
        return cls(n, coeff_denominator, to_q(coeff_bound), 2 * l1_norm(f, tol).hi, tol)

    @property
    def side(self) -> int:
        return math.floor(self.coeff_bound * self.coeff_denominator)

    @property
    def raw_size(self) -> int:
        return (2 * self.side + 1) ** (self.n + 1)

    def polynomial(self, numerators: Sequence[int]) -> Polynomial:
        d = self.coeff_denominator
        return Polynomial([Fraction(int(a), d) for a in numerators], self.n)

    def to_json(self) -> dict[str, Any]:
        return {"n": self.n, "coeff_denominator": self.coeff_denominator,
                "coeff_bound": fmt(self.coeff_bound),
                "l1_cap": None if self.l1_cap is None else fmt(self.l1_cap),
                "tol": fmt(self.tol)}


def _raw_vectors(g: PolyGrid) -> np.ndarray:
    """All numerator vectors ``(a_0, ..., a_n)`` in lexicographic order."""
    if g.raw_size > MAX_GRID:
        raise GridTooLarge(f"grid has {g.raw_size} coefficient vectors (limit {MAX_GRID})")
    r = np.arange(-g.side, g.side + 1, dtype=np.int64)
    mesh = np.meshgrid(*([r] * (g.n + 1)), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


class _Panels:
    """Integer panel integrals: ``S[i, j] / scale`` is the integral of the
    ``i``-th grid polynomial over ``[j/PANELS, (j+1)/PANELS]``."""

    def __init__(self, g: PolyGrid):
        self.grid = g
        self.vectors = _raw_vectors(g)
        moments = [[(Fraction(j + 1, PANELS) ** (k + 1) - Fraction(j, PANELS) ** (k + 1)) / (k + 1)
                    for j in range(PANELS)] for k in range(g.n + 1)]
        L = math.lcm(*(m.denominator for row in moments for m in row))
        M = np.array([[int(m * L) for m in row] for row in moments], dtype=np.int64)
        self.scale = g.coeff_denominator * L
        self.sums = self.vectors @ M
        if g.l1_cap is None:
            self.candidates = np.arange(len(self.vectors))
        else:
            lb = np.abs(self.sums).sum(axis=1)
            self.candidates = np.nonzero(lb <= math.floor(g.l1_cap * self.scale))[0]

    def distance_lower_bounds(self, f: FunExpr) -> np.ndarray:
        """Numerators (over ``scale``) of lower bounds on ``||f - p||_1`` for
        each candidate: the sum over panels of ``|integral(f - p)|``."""
        lo, hi = [], []
        for j in range(PANELS):
            enc = integral(f, Fraction(j, PANELS), Fraction(j + 1, PANELS))
            lo.append(math.floor(enc.lo * self.scale))
            hi.append(math.ceil(enc.hi * self.scale))
        S = self.sums[self.candidates]
        lo_a, hi_a = np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64)
        gap = np.maximum(np.maximum(S - hi_a, lo_a - S), 0)
        return gap.sum(axis=1)


_PANEL_CACHE: dict[PolyGrid, _Panels] = {}


def _panels(g: PolyGrid) -> _Panels:
    hit = _PANEL_CACHE.get(g)
    if hit is None:
        if len(_PANEL_CACHE) > 8:
            _PANEL_CACHE.clear()
        hit = _PANEL_CACHE[g] = _Panels(g)
    return hit


def is_member(g: PolyGrid, p: Polynomial) -> bool:
    return g.l1_cap is None or abs_integral_poly(p, 0, 1, g.tol).hi <= g.l1_cap


def enumerate_grid(g: PolyGrid) -> Iterator[Polynomial]:
    """Certified grid members in lexicographic order of coefficient vectors."""
    pan = _panels(g)
    for i in pan.candidates:
        p = g.polynomial(pan.vectors[i])
        if is_member(g, p):
            yield p


def grid_members(g: PolyGrid) -> list[Polynomial]:
    out = list(enumerate_grid(g))
    if not out:
        raise EmptyGrid(f"no polynomial of the grid has certified L1 norm <= {fmt(g.l1_cap)}")
    return out


class _Distance:
    """Certified ``||f - p||_1`` for polynomials ``p`` of one grid."""

    def __init__(self, f: FunExpr, g: PolyGrid):
        self.f, self.grid = f, g
        try:
            self.pieces = to_piecewise(f).pieces
        except NotPiecewiseExact:
            self.pieces = None

    def __call__(self, p: Polynomial) -> Enclosure:
        tol = self.grid.tol
        if self.pieces is None:
            return l1_norm(self.f - Poly(p), tol)
        share = tol / len(self.pieces)
        total = Enclosure(ZERO, ZERO)
        for a, b, q in self.pieces:
            width = max(len(q.coeffs), len(p.coeffs))
            cs = [q.coeff(k) - p.coeff(k) for k in range(width)]
            total = total + abs_integral_poly(Polynomial(cs), a, b, share)
        return total


@dataclass(frozen=True)
class GridBest:
    poly: Polynomial
    distance: Enclosure
    evaluated: int
    """Members whose distance was certified (the rest were pruned)."""

    def __iter__(self):
        return iter((self.poly, self.distance))


def _search(f: FunExpr, g: PolyGrid):
    pan = _panels(g)
    lbs = pan.distance_lower_bounds(f)
    order = np.argsort(lbs, kind="stable")
    return pan, lbs, order


def best_on_grid(f: FunExpr, g: PolyGrid, tol: RationalLike | None = None,
                 verify: bool = True) -> GridBest:
    """The member minimising the midpoint of its distance enclosure, ties
    broken lexicographically.  With ``verify``, a second pass over the grid
    in reverse order recomputes every distance it cannot prune and checks
    that nothing beats the answer."""
    if tol is not None and to_q(tol) != g.tol:
        g = PolyGrid(g.n, g.coeff_denominator, g.coeff_bound, g.l1_cap, to_q(tol))
    pan, lbs, order = _search(f, g)
    dist = _Distance(f, g)
    scale = pan.scale
    best: tuple[Fraction, int, Polynomial, Enclosure] | None = None
    evaluated = 0
    for k in order:
        if best is not None and Fraction(int(lbs[k]), scale) - g.tol > best[3].hi:
            break
        p = g.polynomial(pan.vectors[pan.candidates[k]])
        if not is_member(g, p):
            continue
        e = dist(p)
        evaluated += 1
        key = (e.mid, int(pan.candidates[k]))
        if best is None or key < best[:2]:
            best = (e.mid, int(pan.candidates[k]), p, e)
    if best is None:
        raise EmptyGrid("grid has no certified member")
    if verify:
        _reverse_pass(f, g, pan, lbs, best)
    return GridBest(best[2], best[3], evaluated)


def _reverse_pass(f: FunExpr, g: PolyGrid, pan: _Panels, lbs: np.ndarray, best) -> None:
    dist = _Distance(f, g)
    scale = pan.scale
    for k in range(len(pan.candidates) - 1, -1, -1):
        if Fraction(int(lbs[k]), scale) - g.tol > best[3].hi:
            continue
        p = g.polynomial(pan.vectors[pan.candidates[k]])
        if not is_member(g, p):
            continue
        e = dist(p)
        if (e.mid, int(pan.candidates[k])) < best[:2]:
            raise TheoremViolation("grid minimum not confirmed by the reverse pass",
                                   best=str(best[2]), better=str(p))


def minimizer_gap(f: FunExpr, g: PolyGrid) -> Fraction | None:
    """Midpoint gap between the two smallest distinct grid distances, or
    ``None`` when every member is equally close."""
    pan, lbs, order = _search(f, g)
    dist = _Distance(f, g)
    found: list[Fraction] = []
    for k in order:
        if len(found) == 2 and Fraction(int(lbs[k]), pan.scale) - g.tol > found[1]:
            break
        p = g.polynomial(pan.vectors[pan.candidates[k]])
        if not is_member(g, p):
            continue
        m = dist(p).mid
        if m not in found:
            found = sorted(found + [m])[:2]
    return found[1] - found[0] if len(found) == 2 else None


def minimizer_gap_trend(f: FunExpr, n: int, denominators: Sequence[int],
                        coeff_bound: RationalLike = 4) -> list[tuple[int, Fraction | None]]:
    """``minimizer_gap`` as the grid denominator grows (recorded, not asserted)."""
    return [(d, minimizer_gap(f, PolyGrid.for_function(f, n, d, coeff_bound)))
            for d in denominators]


@dataclass(frozen=True)
class NearlyBest:
    members: tuple[Polynomial, ...]
    boundary: tuple[Polynomial, ...]
    best: GridBest
    threshold: Fraction
    distances: dict[Polynomial, Enclosure] = field(default_factory=dict, compare=False)


def nearly_best_set(f: FunExpr, g: PolyGrid, delta: RationalLike,
                    tol: RationalLike | None = None, best: GridBest | None = None) -> NearlyBest:
    """Members certified to satisfy ``hi(||f-p||_1) < lo(best) + delta``.
    Members whose enclosure straddles the threshold are listed as
    ``boundary`` instead."""
    delta = to_q(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if tol is not None and to_q(tol) != g.tol:
        g = PolyGrid(g.n, g.coeff_denominator, g.coeff_bound, g.l1_cap, to_q(tol))
    best = best or best_on_grid(f, g)
    threshold = best.distance.lo + delta
    pan, lbs, order = _search(f, g)
    dist = _Distance(f, g)
    members, boundary, dists = [], [], {}
    for k in order:
        if Fraction(int(lbs[k]), pan.scale) >= threshold:
            break
        idx = int(pan.candidates[k])
        p = g.polynomial(pan.vectors[idx])
        if not is_member(g, p):
            continue
        e = dist(p)
        if e.hi < threshold:
            members.append((idx, p))
            dists[p] = e
        elif e.lo < threshold:
            boundary.append((idx, p))
    members.sort(key=lambda t: t[0])
    boundary.sort(key=lambda t: t[0])
    return NearlyBest(tuple(p for _, p in members), tuple(p for _, p in boundary),
                      best, threshold, dists)


def poly_distance(p: Polynomial, q: Polynomial, tol: RationalLike = DEFAULT_TOL) -> Enclosure:
    width = max(len(p.coeffs), len(q.coeffs))
    return abs_integral_poly(Polynomial([p.coeff(k) - q.coeff(k) for k in range(width)]), 0, 1, tol)


# ---------------------------------------------------------------------------
# Report


@dataclass(frozen=True)
class CheckRecord:
    id: str
    status: Status
    lo: Fraction
    hi: Fraction
    witness: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "status": self.status.value, "lo": fmt(self.lo),
                "hi": fmt(self.hi), "witness": self.witness}


@dataclass
class Report:
    suite: str
    config: Mapping[str, Any]
    checks: list[CheckRecord] = field(default_factory=list)

    @property
    def summary(self) -> dict[str, int]:
        out = {s.value: 0 for s in Status}
        for c in self.checks:
            out[c.status.value] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 0 if self.summary["fail"] == 0 else 1

    def to_json(self, timestamp: str | None = None) -> dict[str, Any]:
        return {"suite": self.suite, "config": self.config,
                "checks": [c.to_json() for c in self.checks], "summary": self.summary,
                "timestamp": timestamp or datetime.now(timezone.utc).isoformat()}

    def dumps(self, timestamp: str | None = None) -> str:
        return json.dumps(self.to_json(timestamp), indent=2, ensure_ascii=False) + "\n"


def _combine(statuses: Iterable[Status]) -> Status:
    seen = set(statuses)
    if Status.FAIL in seen:
        return Status.FAIL
    if Status.INCONCLUSIVE in seen:
        return Status.INCONCLUSIVE
    return Status.PASS


def _poly_json(p: Polynomial) -> list[str]:
    return [fmt(c) for c in p.coeffs]


# ---------------------------------------------------------------------------
# Checks on grids


def check_uniqueness_property(f: FunExpr, n: int, eps: RationalLike, g: PolyGrid,
                              check_id: str | None = None) -> CheckRecord:
    """Every pair of ``Phi_f(eps)``-nearly-best grid members is within ``eps``."""
    eps = to_q(eps)
    f_l1 = l1_norm(f, g.tol).hi
    phi = uniqueness_modulus(n, f.modulus(), f_l1)
    delta = phi(eps)
    nb = nearly_best_set(f, g, delta)
    statuses, worst = [], Enclosure(ZERO, ZERO)
    failures = []
    for p1, p2 in itertools.combinations(nb.members, 2):
        d = poly_distance(p1, p2, g.tol)
        if d.hi > worst.hi:
            worst = d
        if d.hi < eps:
            statuses.append(Status.PASS)
        elif d.lo >= eps:
            statuses.append(Status.FAIL)
            failures.append([_poly_json(p1), _poly_json(p2), str(d)])
        else:
            statuses.append(Status.INCONCLUSIVE)
    status = _combine(statuses) if nb.members else Status.INCONCLUSIVE
    witness = {"function": funexpr_to_json(f), "n": n, "eps": fmt(eps), "phi": fmt(delta),
               "grid": g.to_json(), "best": _poly_json(nb.best.poly),
               "best_distance": str(nb.best.distance),
               "members": [_poly_json(p) for p in nb.members],
               "boundary": [_poly_json(p) for p in nb.boundary],
               "pairs": len(statuses), "failures": failures}
    return CheckRecord(check_id or f"uniqueness:n={n}:eps={fmt(eps)}", status,
                       worst.lo, worst.hi, witness)


def check_stability(f: FunExpr, f_prime: FunExpr, n: int, delta: RationalLike, g: PolyGrid,
                    g_prime: PolyGrid | None = None, check_id: str | None = None) -> CheckRecord:
    """Grid-best approximations of ``f`` and ``f'`` are within ``delta`` when
    ``||f - f'||_1`` is certified below the stability radius."""
    delta = to_q(delta)
    f_l1 = l1_norm(f, g.tol).hi
    radius = stability_radius(uniqueness_modulus(n, f.modulus(), f_l1), delta)
    gap = l1_norm(f - f_prime, min(g.tol, radius / 4))
    cid = check_id or f"stability:n={n}:delta={fmt(delta)}"
    witness: dict[str, Any] = {"function": funexpr_to_json(f), "perturbed": funexpr_to_json(f_prime),
                               "delta": fmt(delta), "radius": fmt(radius), "f_gap": str(gap)}
    if not gap.hi < radius:
        witness["reason"] = "||f - f'||_1 below the stability radius not certified"
        return CheckRecord(cid, Status.INCONCLUSIVE, gap.lo, gap.hi, witness)
    if g_prime is None:
        g_prime = PolyGrid.for_function(f_prime, g.n, g.coeff_denominator, g.coeff_bound, g.tol)
    b1, b2 = best_on_grid(f, g), best_on_grid(f_prime, g_prime)
    d = poly_distance(b1.poly, b2.poly, g.tol)
    witness.update(best=_poly_json(b1.poly), best_perturbed=_poly_json(b2.poly),
                   grid=g.to_json(), grid_perturbed=g_prime.to_json())
    status = Status.PASS if d.hi < delta else Status.FAIL if d.lo >= delta else Status.INCONCLUSIVE
    return CheckRecord(cid, status, d.lo, d.hi, witness)


def _markov_chunk(args: tuple[int, int, int, list[int]]) -> tuple[int, int, int, list]:
    n, den, side, firsts = args
    r = range(-side, side + 1)
    passed = inconclusive = 0
    violations = []
    for a0 in firsts:
        for rest in itertools.product(r, repeat=n):
            p = Polynomial([Fraction(a0, den)] + [Fraction(a, den) for a in rest], n)
            ok = True
            for check in (markov_derivative_check, markov_l1_check):
                try:
                    if not check(p).holds:
                        ok = False
                except TheoremViolation as exc:
                    violations.append([_poly_json(p), str(exc)])
                    ok = False
            if ok:
                passed += 1
            elif not violations or violations[-1][0] != _poly_json(p):
                inconclusive += 1
    return passed, inconclusive, len(violations), violations[:5]


def check_markov_grid(n: int, denominator: int, bound: RationalLike,
                      check_id: str | None = None) -> CheckRecord:
    """Both Markov-type inequalities on every polynomial of the grid."""
    side = math.floor(to_q(bound) * denominator)
    firsts = list(range(-side, side + 1))
    chunks = [(n, denominator, side, firsts[i::8]) for i in range(8)]
    results = _parallel_map(_markov_chunk, chunks)
    passed = sum(r[0] for r in results)
    inconclusive = sum(r[1] for r in results)
    violations = sum(r[2] for r in results)
    examples = [v for r in results for v in r[3]][:5]
    status = Status.FAIL if violations else Status.INCONCLUSIVE if inconclusive else Status.PASS
    total = (2 * side + 1) ** (n + 1)
    witness = {"n": n, "denominator": denominator, "bound": fmt(to_q(bound)),
               "polynomials": total, "certified": passed, "inconclusive": inconclusive,
               "violations": examples}
    return CheckRecord(check_id or f"markov:n={n}", status, Fraction(violations),
                       Fraction(violations), witness)


# ---------------------------------------------------------------------------
# Suite


def _q(obj: Mapping[str, Any], key: str, default: Any = None) -> Fraction:
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing field {key!r}")
        return to_q(default)
    try:
        return to_q(obj[key]) if not isinstance(obj[key], str) else _parse_q(obj[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {key!r}: {exc}") from None


def _parse_q(text: str) -> Fraction:
    from .rational import parse_rational
    return parse_rational(text)


def _fun(obj: Any) -> FunExpr:
    if isinstance(obj, str):
        named = NAMED_FUNCTIONS.get(obj)
        if named is None:
            raise ConfigError(f"unknown function name {obj!r}")
        return named
    return funexpr_from_json(obj)


NAMED_FUNCTIONS: dict[str, FunExpr] = {
    "tent": TENT,
    "x": poly(0, 1),
    "2x-1": poly(-1, 2),
}


def _run_reduction(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    g, h = _fun(inst["g"]), _fun(inst["h"])
    zeta = _q(inst, "zeta")
    cover = build_cover(g, zeta, int(inst.get("grid_denominator", 256)))
    eps = _q(inst, "eps") if "eps" in inst else cover.total_measure
    K = _q(inst, "K") if "K" in inst else _sup_hi(h)
    r = verify_reduction(g, h, eps, zeta, K, cover, _q(inst, "tol", Fraction(1, 4096)))
    witness: dict[str, Any] = {"eps": fmt(eps), "zeta": fmt(zeta), "K": fmt(K),
                               "cover": cover.to_json(), "reason": r.reason,
                               "enclosures": {k: str(v) for k, v in r.enclosures.items()}}
    if r.witness is not None:
        witness.update(lam=fmt(r.witness.lam), gap=fmt(r.witness.gap))
    if "l1_g" in r.enclosures:
        a, b = r.enclosures["l1_g"], r.enclosures["l1_shifted"]
        lo, hi = a.lo - b.hi, a.hi - b.lo
    else:
        lo = hi = ZERO
    return CheckRecord(cid, r.status, lo, hi, witness)


def _sup_hi(h: FunExpr) -> Fraction:
    from .analysis import sup_norm
    return sup_norm(h, Fraction(1, 4096)).hi


def _run_uniqueness(inst: Mapping[str, Any], cid: str) -> list[CheckRecord]:
    f = _fun(inst["f"])
    n = int(inst.get("n", 1))
    g = PolyGrid.for_function(f, n, int(inst.get("denominator", 64)), _q(inst, "bound", 4),
                              _q(inst, "tol", DEFAULT_TOL))
    eps_list = inst.get("eps", ["1/4"])
    if not isinstance(eps_list, list):
        eps_list = [eps_list]
    out = [check_uniqueness_property(f, n, _parse_q(str(e)), g, f"{cid}:eps={e}")
           for e in eps_list]
    if "trend" in inst:
        trend = minimizer_gap_trend(f, n, [int(d) for d in inst["trend"]], g.coeff_bound)
        out[-1].witness["minimizer_gap_trend"] = [[d, None if t is None else fmt(t)]
                                                   for d, t in trend]
    return out


def _run_stability(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    f = _fun(inst["f"])
    n = int(inst.get("n", 1))
    delta = _q(inst, "delta")
    g = PolyGrid.for_function(f, n, int(inst.get("denominator", 64)), _q(inst, "bound", 4),
                              _q(inst, "tol", DEFAULT_TOL))
    if "eta" in inst:
        eta = _q(inst, "eta")
    else:
        f_l1 = l1_norm(f, g.tol).hi
        eta = stability_radius(uniqueness_modulus(n, f.modulus(), f_l1), delta) / 2
    f_prime = f + Scale(eta, poly(1))
    rec = check_stability(f, f_prime, n, delta, g, check_id=cid)
    rec.witness["eta"] = fmt(eta)
    return rec


def _run_near_zeros(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    f = _fun(inst["f"])
    n = int(inst["n"])
    p = Polynomial([_parse_q(str(c)) for c in inst["p"]], n)
    r = find_near_zeros(f, p, n, _q(inst, "zeta"), inst.get("grid_denominator"),
                        bool(inst.get("certified_nearly_best", False)))
    status = r.status
    if r.status is Status.PASS and not r.certificate.validate(f, p):
        status = Status.FAIL
    found = Fraction(len(r.found))
    witness = {"points": [fmt(x) for x in r.found], "grid_denominator": r.grid_denominator,
               "defect": r.defect}
    if r.status is Status.FAIL and not r.defect:
        status = Status.INCONCLUSIVE
    return CheckRecord(cid, status, found, found, witness)


def _run_sup_from_l1(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    q = _fun(inst["q"])
    omega = parse_modulus(inst["omega"]) if "omega" in inst else q.modulus()
    r = sup_from_l1(q, omega, _q(inst, "eps"))
    witness = {"l1": str(r.l1), "bound": fmt(r.bound), "sup": None if r.sup is None else str(r.sup)}
    enc = r.sup or r.l1
    return CheckRecord(cid, r.status, enc.lo, enc.hi, witness)


def _run_modulus(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    phi = uniqueness_modulus(int(inst["n"]), parse_modulus(inst["omega"]), _q(inst, "f_l1"))
    value = phi(_q(inst, "eps"))
    witness: dict[str, Any] = {"value": fmt(value)}
    status = Status.PASS
    if "expect" in inst:
        expect = _q(inst, "expect")
        witness["expect"] = fmt(expect)
        status = Status.PASS if value == expect else Status.FAIL
    return CheckRecord(cid, status, value, value, witness)


def _run_q_contract(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    f = _fun(inst["f"])
    n = int(inst.get("n", 1))
    omega_f = parse_modulus(inst["omega"]) if "omega" in inst else f.modulus()
    f_l1 = _q(inst, "f_l1") if "f_l1" in inst else l1_norm(f).hi
    deltas = [_parse_q(str(d)) for d in inst.get("deltas", default_deltas())]
    assembled = assembled_q_modulus(n, omega_f, f_l1)
    displayed = displayed_q_modulus(n, omega_f, f_l1)
    mismatches = [[fmt(d), fmt(assembled(d)), fmt(displayed(d))]
                  for d in deltas if assembled(d) != displayed(d)]
    status = Status.FAIL if mismatches else Status.PASS
    k = Fraction(len(mismatches))
    witness = {"omega_f": omega_f.spec(), "f_l1": fmt(f_l1), "deltas": len(deltas),
               "assembled": assembled.simplify().spec(), "mismatches": mismatches}
    return CheckRecord(cid, status, k, k, witness)


def default_deltas() -> list[str]:
    return [fmt(Fraction(k, 16)) for k in range(1, 17)]


def _run_nd(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    from .corpus import BY_NAME
    from .formula import parse
    from .models import nd_equivalence

    if "corpus" in inst:
        entry = BY_NAME.get(inst["corpus"])
        if entry is None:
            raise ConfigError(f"unknown corpus entry {inst['corpus']!r}")
        f = entry.formula
    else:
        f = parse(inst["formula"])
    r = nd_equivalence(f, int(inst.get("max_size", 3)))
    if r.mismatches:
        status = Status.FAIL
    elif r.skipped:
        status = Status.INCONCLUSIVE
    else:
        status = Status.PASS
    m = Fraction(r.mismatches)
    witness = {"assignments": r.assignments, "tables": str(r.tables),
               "skipped": [list(s) for s in r.skipped], "counterexample": r.counterexample}
    return CheckRecord(cid, status, m, m, witness)


def _run_roundtrip(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    from .corpus import CORPUS
    from .formula import parse_file, render_file

    bad = [e.name for e in CORPUS
           if parse_file(render_file(e.file)).formula != e.formula or render_file(e.file) != e.text]
    k = Fraction(len(bad))
    return CheckRecord(cid, Status.FAIL if bad else Status.PASS, k, k,
                       {"entries": len(CORPUS), "failures": bad})


def _run_metastability(inst: Mapping[str, Any], cid: str) -> CheckRecord:
    from .metastability import (
        MetastabilityExhausted,
        MetastabilityProblem,
        metastability_search,
        metastable_refine,
        parse_bound,
    )

    start = int(inst.get("start", 0))
    if "values" in inst:
        values = tuple(_parse_q(str(v)) for v in inst["values"])
    else:
        kind, length = inst.get("sequence", "reciprocal"), int(inst.get("length", 64))
        if kind == "reciprocal":
            values = tuple(Fraction(1, k) for k in range(start, start + length))
        elif kind == "constant":
            values = (_q(inst, "value", 1),) * length
        else:
            raise ConfigError(f"unknown sequence kind {kind!r}")
    p = MetastabilityProblem(values, _q(inst, "eps"), parse_bound(inst["F"]), start)
    expect = inst.get("expect")
    witness: dict[str, Any] = {"length": len(values), "start": start}
    try:
        r = metastability_search(p)
        found = r.found_n
        witness.update(r.to_json())
        refined = metastable_refine(p)
        witness["window_fixed"] = refined(found) == p.F(found)
    except MetastabilityExhausted as exc:
        found = None
        witness["exhausted"] = exc.scanned_max
    if expect is None:
        status = Status.PASS if found is not None else Status.INCONCLUSIVE
    elif expect == "exhausted":
        status = Status.PASS if found is None else Status.FAIL
    else:
        status = Status.PASS if found == int(expect) else Status.FAIL
    if found is not None and not witness["window_fixed"]:
        status = Status.FAIL
    v = Fraction(-1 if found is None else found)
    return CheckRecord(cid, status, v, v, witness)


def _run_markov(inst: Mapping[str, Any], cid: str) -> list[CheckRecord]:
    ns = inst.get("n", [1, 2])
    ns = ns if isinstance(ns, list) else [ns]
    return [check_markov_grid(int(n), int(inst.get("denominator", 16)), _q(inst, "bound", 2),
                              f"{cid}:n={n}") for n in ns]


_RUNNERS: dict[str, Callable[[Mapping[str, Any], str], CheckRecord | list[CheckRecord]]] = {
    "roundtrip": _run_roundtrip,
    "nd_equivalence": _run_nd,
    "markov": _run_markov,
    "reduction": _run_reduction,
    "near_zeros": _run_near_zeros,
    "sup_from_l1": _run_sup_from_l1,
    "modulus": _run_modulus,
    "uniqueness": _run_uniqueness,
    "stability": _run_stability,
    "q_contract": _run_q_contract,
    "metastability": _run_metastability,
}


def run_instance(inst: Mapping[str, Any], index: int = 0) -> list[CheckRecord]:
    if not isinstance(inst, Mapping) or "check" not in inst:
        raise ConfigError(f"instance {index} must be an object with a 'check' field")
    runner = _RUNNERS.get(inst["check"])
    if runner is None:
        raise ConfigError(f"instance {index}: unknown check {inst['check']!r}")
    cid = str(inst.get("id", f"{inst['check']}#{index}"))
    try:
        out = runner(inst, cid)
    except KeyError as exc:
        raise ConfigError(f"instance {index}: missing field {exc}") from None
    return out if isinstance(out, list) else [out]


def run_suite(config: Mapping[str, Any]) -> Report:
    if not isinstance(config, Mapping):
        raise ConfigError("config must be a JSON object")
    instances = config.get("instances", [])
    if not isinstance(instances, list):
        raise ConfigError("'instances' must be a list")
    report = Report(str(config.get("suite", "prooflens")), config)
    for i, inst in enumerate(instances):
        report.checks.extend(run_instance(inst, i))
    return report


def load_config(text: str) -> dict[str, Any]:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


# ---------------------------------------------------------------------------
# The desk-scale acceptance suite


REDUCTION_INSTANCES: tuple[dict[str, Any], ...] = (
    {"id": "reduction:linear-const", "g": {"kind": "poly", "coeffs": ["-1/2", "2"]},
     "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/16"},
    {"id": "reduction:linear-linear", "g": {"kind": "poly", "coeffs": ["-1", "2"]},
     "h": {"kind": "poly", "coeffs": ["-1", "2"]}, "zeta": "1/16"},
    {"id": "reduction:steep-const", "g": {"kind": "poly", "coeffs": ["-1", "4"]},
     "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/8"},
    {"id": "reduction:quadratic-const", "g": {"kind": "poly", "coeffs": ["-1/4", "0", "4"]},
     "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/16"},
    {"id": "reduction:symmetric-quadratic", "g": {"kind": "poly", "coeffs": ["1/8", "-3", "3"]},
     "h": {"kind": "poly", "coeffs": ["-1"]}, "zeta": "1/32", "grid_denominator": 1024},
    {"id": "reduction:cubic-const", "g": {"kind": "poly", "coeffs": ["-1/8", "3", "-6", "4"]},
     "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/32", "grid_denominator": 2048},
    {"id": "reduction:pl-const", "g": {"kind": "pl", "points": [["0", "-1"], ["1/3", "1"], ["1", "2"]]},
     "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/16"},
    {"id": "reduction:linear-pl", "g": {"kind": "poly", "coeffs": ["-1/2", "2"]},
     "h": {"kind": "pl", "points": [["0", "0"], ["1/2", "1"], ["1", "1"]]}, "zeta": "1/16"},
    {"id": "reduction:pl-tent", "g": {"kind": "pl", "points": [["0", "-1"], ["1/2", "1"], ["1", "-1"]]},
     "h": "tent", "zeta": "1/32"},
    {"id": "reduction:decreasing-linear", "g": {"kind": "poly", "coeffs": ["1/2", "-2"]},
     "h": {"kind": "poly", "coeffs": ["-1"]}, "zeta": "1/16"},
)


def default_config() -> dict[str, Any]:
    """The acceptance suite at desk scale."""
    from .corpus import CORPUS

    inst: list[dict[str, Any]] = [{"check": "roundtrip", "id": "corpus:roundtrip"}]
    inst += [{"check": "nd_equivalence", "id": f"nd:{e.name}", "corpus": e.name, "max_size": 3}
             for e in CORPUS if e.nd_checkable]
    inst.append({"check": "markov", "id": "markov", "n": [1, 2], "denominator": 16, "bound": "2"})
    inst += [{"check": "reduction", **r} for r in REDUCTION_INSTANCES]
    for f in NAMED_FUNCTIONS:
        inst.append({"check": "uniqueness", "id": f"uniqueness:{f}", "f": f, "n": 1,
                     "eps": ["1/4", "1/16"], "denominator": 64, "bound": "4",
                     "trend": [8, 16, 32, 64]})
    for f in NAMED_FUNCTIONS:
        inst.append({"check": "stability", "id": f"stability:{f}", "f": f, "n": 1,
                     "delta": "1/4", "denominator": 64, "bound": "4"})
    for f in NAMED_FUNCTIONS:
        inst.append({"check": "q_contract", "id": f"q_contract:{f}", "f": f, "n": 1,
                     "deltas": default_deltas()})
    inst += [
        {"check": "metastability", "id": "metastability:reciprocal", "sequence": "reciprocal",
         "start": 1, "length": 64, "eps": "1/10", "F": "affine:2:0", "expect": 6},
        {"check": "metastability", "id": "metastability:constant", "sequence": "constant",
         "value": "1/3", "length": 16, "eps": "1/10", "F": "affine:3:1", "expect": 0},
    ]
    return {"suite": "acceptance", "instances": inst}
