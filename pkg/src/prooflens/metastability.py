"""Metastability of finite rational sequences against a bound function F."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

from .rational import RationalLike, fmt, parse_rational, to_q


class IndexOutOfRange(IndexError):
    pass


class MetastabilityExhausted(LookupError):
    """No stable window exists among the indices whose window fits in the
    represented range."""

    def __init__(self, scanned_max: int | None):
        self.scanned_max = scanned_max
        super().__init__(f"no stable window found (scanned up to n = {scanned_max})")


@dataclass(frozen=True)
class Affine:
    """``F(n) = a*n + b`` on naturals."""

    a: int
    b: int

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def spec(self) -> str:
        return f"affine:{self.a}:{self.b}"


@dataclass(frozen=True)
class Table:
    """``F`` given explicitly on ``start, start+1, ...``."""

    values: tuple[int, ...]
    start: int = 0

    def __call__(self, n: int) -> int:
        i = n - self.start
        if not 0 <= i < len(self.values):
            raise IndexOutOfRange(f"F({n}) is not tabulated")
        return self.values[i]

    def defined(self, n: int) -> bool:
        return 0 <= n - self.start < len(self.values)


Bound = Affine | Table


@dataclass(frozen=True)
class MetastabilityProblem:
    """Values ``alpha_n`` for ``n = start, ..., start + len(values) - 1``."""

    values: tuple[Fraction, ...]
    epsilon: Fraction
    F: Bound
    start: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(to_q(v) for v in self.values))
        object.__setattr__(self, "epsilon", to_q(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.start < 0:
            raise ValueError("indices are natural numbers")
        for n in self.indices:
            if self._has_bound(n) and self.F(n) < 0:
                raise ValueError(f"F({n}) = {self.F(n)} is negative")

    @property
    def indices(self) -> range:
        return range(self.start, self.start + len(self.values))

    @property
    def last(self) -> int:
        return self.start + len(self.values) - 1

    def _has_bound(self, n: int) -> bool:
        return not isinstance(self.F, Table) or self.F.defined(n)

    def alpha(self, n: int) -> Fraction:
        i = n - self.start
        if not 0 <= i < len(self.values):
            raise IndexOutOfRange(f"alpha_{n} is outside the represented range")
        return self.values[i]

    def window_fits(self, n: int) -> bool:
        return self._has_bound(n) and self.F(n) <= self.last

    def first_violation(self, n: int) -> int | None:
        """Least ``m`` in ``[n, F(n)]`` with ``|alpha_n - alpha_m| >= eps``."""
        if not self.window_fits(n):
            raise IndexOutOfRange(f"window [{n}, F({n})] leaves the represented range")
        a = self.alpha(n)
        for m in range(n, self.F(n) + 1):
            if abs(a - self.alpha(m)) >= self.epsilon:
                return m
        return None


def metastable_refine(p: MetastabilityProblem) -> Table:
    """``F'(n)``: the first index in ``[n, F(n)]`` that breaks stability at
    ``n``, or ``F(n)`` when there is none.

    Tabulated on the leading indices whose window fits in the range.
    """
    out = []
    for n in p.indices:
        if not p.window_fits(n):
            break
        m = p.first_violation(n)
        out.append(p.F(n) if m is None else m)
    return Table(tuple(out), p.start)


@dataclass(frozen=True)
class MetastabilityResult:
    found_n: int
    scanned_max: int
    stable_window: tuple[int, int]

    def to_json(self) -> dict[str, Any]:
        return {"found_n": self.found_n, "scanned_max": self.scanned_max,
                "stable_window": list(self.stable_window)}


def metastability_search(p: MetastabilityProblem) -> MetastabilityResult:
    """Least ``n`` with ``|alpha_n - alpha_m| < eps`` for all ``m`` in ``[n, F(n)]``."""
    scanned = None
    for n in p.indices:
        if not p.window_fits(n):
            break
        scanned = n
        if p.first_violation(n) is None:
            return MetastabilityResult(n, n, (n, p.F(n)))
    raise MetastabilityExhausted(scanned)


# ---------------------------------------------------------------------------
# File and flag formats


class MetastabilitySpecError(ValueError):
    pass


def parse_bound(spec: str, base: Path | None = None) -> Bound:
    """``affine:a:b`` or ``table:path`` (a JSON list, or an object with
    ``start`` and ``values``)."""
    kind, _, rest = spec.partition(":")
    if kind == "affine":
        parts = rest.split(":")
        if len(parts) != 2:
            raise MetastabilitySpecError("affine bound must be affine:a:b")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MetastabilitySpecError("affine coefficients must be integers") from None
        if a < 0:
            raise MetastabilitySpecError("affine slope must be non-negative")
        return Affine(a, b)
    if kind == "table":
        path = Path(rest)
        if base is not None and not path.is_absolute():
            path = base / path
        data = json.loads(path.read_text())
        start, values = _start_values(data)
        try:
            return Table(tuple(int(v) for v in values), start)
        except (TypeError, ValueError):
            raise MetastabilitySpecError("table entries must be integers") from None
    raise MetastabilitySpecError(f"unknown bound spec {spec!r}")


def _start_values(data: Any) -> tuple[int, Sequence]:
    if isinstance(data, list):
        return 0, data
    if isinstance(data, Mapping) and "values" in data:
        return int(data.get("start", 0)), data["values"]
    raise MetastabilitySpecError("expected a list or an object with 'values'")


def load_sequence(text: str) -> tuple[int, tuple[Fraction, ...]]:
    """A JSON list of ``"p/q"`` strings, a JSON object with ``start`` and
    ``values``, or one rational per line."""
    stripped = text.strip()
    if stripped.startswith(("[", "{")):
        start, values = _start_values(json.loads(stripped))
        return start, tuple(parse_rational(str(v)) for v in values)
    lines = [ln.strip() for ln in stripped.splitlines()]
    return 0, tuple(parse_rational(ln) for ln in lines if ln and not ln.startswith("#"))


def reciprocal_sequence(n_max: int, start: int = 1) -> tuple[Fraction, ...]:
    """``1/n`` for ``n = start .. n_max``."""
    return tuple(Fraction(1, n) for n in range(start, n_max + 1))


def describe(p: MetastabilityProblem) -> dict[str, Any]:
    return {"start": p.start, "length": len(p.values), "epsilon": fmt(p.epsilon),
            "F": p.F.spec() if isinstance(p.F, Affine) else "table"}


def problem(values: Sequence[RationalLike], eps: RationalLike, F: Bound,
            start: int = 0) -> MetastabilityProblem:
    return MetastabilityProblem(tuple(to_q(v) for v in values), to_q(eps), F, start)
