"""Exceptions shared across the numeric modules."""

from __future__ import annotations

from enum import Enum


class TheoremViolation(RuntimeError):
    """A check that implements a theorem produced a certified counterexample.

    This never signals bad input; it means the implementation (or the
    arithmetic underneath it) is defective, and callers should stop.
    """

    def __init__(self, what: str, **evidence):
        self.what = what
        self.evidence = evidence
        detail = ", ".join(f"{k}={v}" for k, v in evidence.items())
        super().__init__(f"{what}: {detail}" if detail else what)


class Status(Enum):
    """Three-valued outcome of a certified check.  ``INCONCLUSIVE`` means the
    enclosures were too wide (or a hypothesis could not be certified); it is
    never folded into either of the other two."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
