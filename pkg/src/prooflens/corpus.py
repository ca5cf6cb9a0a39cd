"""Golden formula corpus.

Each entry is a complete formula file: a preamble declaring the domains
and predicates it needs, followed by one formula.  The texts are in
canonical form, so ``render_file(parse_file(text)) == text``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .formula import (
    Formula,
    FormulaFile,
    alternations,
    has_inner_outer,
    parse_file,
)

_UNIT = "(Qc 0 1)"
_FUN01 = "(domains (RQ outer \"R^(Q∩[0,1])\"))"

_UCONT_BODY = (
    "(forall eps Qplus (forall x (Qc 0 1) (forall y (Qc 0 1) "
    "(implies (atom lt (dist x y) (omega eps)) (atom lt (dist (f x) (f y)) eps)))))"
)


def _approx_body(space: str) -> str:
    return (
        f"(forall p1 {space} (forall p2 {space} "
        f"(implies (atom gt (l1dist p1 p2) eps) "
        f"(exists q {space} (or (atom le (plus (l1dist f q) delta) (l1dist f p1)) "
        f"(atom le (plus (l1dist f q) delta) (l1dist f p2)))))))"
    )


_QN = "(domains (Qn compact \"Q_n^Q\"))"
_PN = "(domains (Pn countable \"P_n^Q\"))"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    text: str
    note: str = ""

    @cached_property
    def file(self) -> FormulaFile:
        return parse_file(self.text)

    @property
    def formula(self) -> Formula:
        return self.file.formula

    @property
    def alternations(self) -> int:
        return alternations(self.formula)

    @property
    def nd_checkable(self) -> bool:
        """In scope for the ND truth check: at most two alternations and no
        outer-domain quantifier below the leading universal block."""
        return self.alternations <= 2 and not has_inner_outer(self.formula)


def _entry(name: str, preamble: str, formula: str, note: str = "") -> CorpusEntry:
    text = (preamble + "\n" if preamble else "") + formula + "\n"
    return CorpusEntry(name, text, note)


_ZERO_DOMS = (
    "(domains (RQ outer \"R^(Q∩[0,1])\") (Xs outer \"R^n\") (I compact \"{1..n}\"))"
)
_ZERO_PREDS = "(predicates (rest 2))"
_NEAR_ZERO = "(exists i I (atom lt (dist y (xs i)) delta))"

CORPUS: tuple[CorpusEntry, ...] = (
    _entry("ucont", "", _UCONT_BODY, "modulus of uniform continuity, f and omega free"),
    _entry(
        "cont", "",
        "(forall eps Qplus (exists delta Qplus (forall x (Qc 0 1) (forall y (Qc 0 1) "
        "(implies (atom lt (dist x y) delta) (atom lt (dist (f x) (f y)) eps))))))",
    ),
    _entry("L1", "", "(exists M Qplus (atom lt (intabs f) M))"),
    _entry("approxQ", _QN, _approx_body("Qn"), "polynomials restricted to the compact Q_n"),
    _entry(
        "approx", _PN,
        f"(forall eps Qplus (exists delta Qplus {_approx_body('Pn')}))",
        "polynomials of degree at most n with rational coefficients",
    ),
    _entry(
        "approxQ_conclusion", _QN,
        f"(forall eps Qplus (exists delta Qplus {_approx_body('Qn')}))",
    ),
    _entry(
        "jackson_first_form", "(domains (RQ outer \"R^(Q∩[0,1])\") (Pn countable \"P_n^Q\"))",
        "(forall f RQ (implies (and "
        "(forall eps Qplus (exists delta Qplus (forall x (Qc 0 1) (forall y (Qc 0 1) "
        "(implies (atom lt (dist x y) delta) (atom lt (dist (f x) (f y)) eps)))))) "
        "(exists M Qplus (atom lt (intabs f) M))) "
        f"(forall eps1 Qplus (exists delta1 Qplus {_approx_body('Pn').replace('eps', 'eps1').replace('delta', 'delta1')}))))",
    ),
    _entry(
        "jackson_skolemized", _FUN01,
        "(forall f RQ (forall omega (fun Qplus Qplus) (forall M Qplus (forall eps Qplus "
        "(or (or (not (atom ucont f omega)) (atom ge (intabs f) M)) "
        "(exists delta Qplus (atom approxQ f eps delta)))))))",
        "ucont and approxQ as atoms",
    ),
    _entry(
        "zero_count_first", _ZERO_DOMS + "\n(predicates (rest 2) (iszero 1) (same 2))",
        "(forall g RQ (forall h RQ (implies (exists k N (forall y Q "
        "(implies (atom iszero (g y)) (exists i N (and (atom le i k) (atom same y (xs i))))))) "
        "(atom rest g h))))",
        "equality atoms; the point set is a free symbol xs",
    ),
    _entry(
        "zero_count_rephrased", _ZERO_DOMS + "\n" + _ZERO_PREDS,
        "(forall g RQ (forall h RQ (forall xs Xs (exists y (Qc 0 1) (implies (implies "
        "(forall zeta Qplus (atom lt (abs (g y)) zeta)) "
        "(exists i I (forall delta Qplus (atom lt (dist y (xs i)) delta)))) "
        "(atom rest g h))))))",
    ),
    _entry(
        "zero_count_prenexed", _ZERO_DOMS + "\n" + _ZERO_PREDS,
        "(forall g RQ (forall h RQ (forall xs Xs (exists y (Qc 0 1) (forall zeta Qplus "
        "(exists delta Qplus (implies (implies (atom lt (abs (g y)) zeta) "
        f"{_NEAR_ZERO}) (atom rest g h))))))))",
    ),
    _entry(
        "zero_count_inside", _ZERO_DOMS + "\n" + _ZERO_PREDS,
        "(forall g RQ (forall h RQ (forall xs Xs (forall zeta Qplus (exists delta Qplus "
        "(implies (forall y (Qc 0 1) (implies (atom lt (abs (g y)) zeta) "
        f"{_NEAR_ZERO})) (atom rest g h)))))))",
        "y over an effectively compact domain",
    ),
    _entry(
        "reduction_pi2", _ZERO_DOMS,
        "(forall g RQ (forall h RQ (forall xs Xs (forall omegag (fun Qplus Qplus) "
        "(forall omegah (fun Qplus Qplus) (forall zeta Qplus (forall gamma Qplus "
        "(or (or (or (or "
        "(exists delta Qplus (not (forall y (Qc 0 1) (implies (atom lt (abs (g y)) zeta) "
        f"{_NEAR_ZERO})))) "
        "(not " + _UCONT_BODY.replace("(f ", "(g ").replace("omega", "omegag") + ")) "
        "(not " + _UCONT_BODY.replace("(f ", "(h ").replace("omega", "omegah") + ")) "
        "(atom lt (abs (intsgn h g)) gamma)) "
        "(exists lam Q (atom lt (l1dist g (mul lam h)) (l1norm g)))))))))))",
        "ucont expanded; every negated universal is existential",
    ),
    _entry(
        "pi3", "(predicates (P3 3))",
        "(forall x Q (exists y Q (forall z Q (atom P3 x y z))))",
    ),
    _entry(
        "pi3_functional", "(predicates (P3 3))",
        "(forall x Q (forall Z (fun Q Q) (exists y Q (atom P3 x y (Z y)))))",
    ),
    _entry("pi1", "(predicates (P 1))", "(forall x Q (atom P x))"),
    _entry("pi2", "(predicates (P2 2))", "(forall x Q (exists y Q (atom P2 x y)))"),
    _entry(
        "metastability", "(domains (Seq outer \"R^N\") (W compact \"[n,F(n)]\"))",
        "(forall alpha Seq (forall eps Qplus (forall F (fun N N) (exists n N (forall m W "
        "(atom lt (dist (alpha n) (alpha (within n (F n) m))) eps))))))",
        "window indices form a compact domain",
    ),
    _entry(
        "quantifier_free", "(predicates (P 1) (R 1))",
        "(or (atom P a) (and (not (atom R b)) (implies (atom P b) (atom R a))))",
    ),
    _entry("exists_first", "(predicates (P2 2))", "(exists x Q (forall y Q (atom P2 x y)))"),
)

BY_NAME: dict[str, CorpusEntry] = {e.name: e for e in CORPUS}
