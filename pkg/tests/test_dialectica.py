from __future__ import annotations

import pytest
from hypothesis import given, settings

from prooflens.corpus import BY_NAME
from prooflens.dialectica import (
    NotPi2,
    demorgan_or,
    embed,
    nd,
    pi2_witness_form,
    quantifier_free,
    render_form,
    skolemize,
)
from prooflens.formula import OuterQuantifierError, parse, parse_file, render
from prooflens.models import compare_all_tables, nd_equivalence

from strategies import formula_text

PREAMBLE = "(predicates (P 1) (R 2) (P2 2) (P3 3))"


def P(text: str):
    return parse_file(PREAMBLE + "\n" + text).formula


class TestND:
    def test_atomic(self):
        d = nd(parse("(atom lt a b)"))
        assert d.witnesses == () and d.challenges == ()
        assert render(d.matrix) == "(atom lt a b)"

    def test_forall_exists_gives_skolem_function(self):
        d = nd(BY_NAME["pi2"].formula)
        assert [b.name for b in d.challenges] == ["x"]
        (w,) = d.witnesses
        assert w.deps == ("x",) and w.domain.is_function
        assert "(Y x)" in render(d.matrix)

    def test_pi3_lemma_instance(self):
        r = nd_equivalence(BY_NAME["pi3"].formula, max_size=3)
        assert r.mismatches == 0 and r.exhaustive
        # The functional reading forall x forall Z exists y P3(x, y, Z(y)).
        direct = compare_all_tables(BY_NAME["pi3"].formula, BY_NAME["pi3_functional"].formula, 3)
        assert direct.mismatches == 0 and direct.exhaustive

    def test_matrix_is_quantifier_free(self):
        for name in ("ucont", "cont", "pi3", "zero_count_inside"):
            assert quantifier_free(nd(BY_NAME[name].formula).matrix), name

    def test_outer_prefix_is_carried(self):
        d = nd(BY_NAME["jackson_skolemized"].formula)
        assert [q.var for q in d.outer] == ["f"]
        assert render(embed(d)).startswith("(forall f RQ")

    def test_inner_outer_quantifier_rejected(self):
        text = ('(domains (RQ outer "R"))\n'
                "(forall eps Qplus (forall f RQ (atom lt (f eps) eps)))")
        with pytest.raises(OuterQuantifierError):
            nd(parse_file(text).formula)

    def test_render_form_reparses(self):
        d = nd(BY_NAME["cont"].formula)
        text = render_form(d)
        body = "\n".join(ln for ln in text.splitlines() if not ln.startswith(";"))
        assert parse(body) == embed(d)

    @settings(max_examples=40, deadline=None)
    @given(formula_text(max_depth=4, max_quantifiers=3))
    def test_nd_equivalence_random(self, text):
        f = P(text)
        r = nd_equivalence(f, max_size=2)
        assert r.mismatches == 0, r.counterexample

    @settings(max_examples=25, deadline=None)
    @given(formula_text(max_depth=3, max_quantifiers=2))
    def test_reduced_and_unreduced_agree(self, text):
        f = P(text)
        full = nd_equivalence(f, max_size=2, reduce=False)
        assert full.mismatches == 0, full.counterexample


class TestNegativeControls:
    """A wrong translation must be caught by the table check."""

    def test_swapped_quantifiers_detected(self):
        f = P("(forall x Q (exists y Q (atom R x y)))")
        g = P("(exists y Q (forall x Q (atom R x y)))")
        r = compare_all_tables(f, g, max_size=2)
        assert r.mismatches > 0 and r.counterexample is not None

    def test_dropped_negation_detected(self):
        f = P("(forall x Q (atom P x))")
        g = P("(forall x Q (not (atom P x)))")
        assert compare_all_tables(f, g, max_size=2).mismatches > 0

    def test_wrong_pi3_reading_detected(self):
        f = BY_NAME["pi3"].formula
        # Z(y) ranges over every z, so this variant is a correct reading.
        same = P("(forall x Q (exists y Q (forall Z (fun Q Q) (atom P3 x y (Z y)))))")
        assert compare_all_tables(f, same, max_size=2).mismatches == 0
        wrong = P("(forall x Q (forall z Q (exists y Q (atom P3 x y z))))")
        assert compare_all_tables(f, wrong, max_size=2).mismatches > 0


class TestSkolemize:
    def test_forall_exists(self):
        g = skolemize(BY_NAME["pi2"].formula)
        assert render(g) == "(exists Y (fun Q Q) (forall x Q (atom P2 x (Y x))))"

    def test_cont_gives_modulus(self):
        g = skolemize(BY_NAME["cont"].formula)
        text = render(g)
        assert text.startswith("(exists Delta (fun Qplus Qplus) (forall eps Qplus")
        assert "(Delta eps)" in text

    def test_atom_unchanged(self):
        f = parse("(atom lt a b)")
        assert skolemize(f) == f

    @settings(max_examples=40, deadline=None)
    @given(formula_text(max_depth=4, max_quantifiers=3))
    def test_skolemize_equivalent(self, text):
        f = P(text)
        r = compare_all_tables(f, skolemize(f), max_size=2)
        assert r.mismatches == 0, r.counterexample


class TestWitnessForm:
    def test_pi2_shape(self):
        w = pi2_witness_form(nd(BY_NAME["pi2"].formula))
        assert [b.name for b in w.challenges] == ["x"]
        assert len(w.witnesses) == 1 and w.witnesses[0].domain.is_function

    def test_atomic(self):
        w = pi2_witness_form(nd(parse("(atom lt a b)")))
        assert w.challenges == () and w.witnesses == ()

    def test_skolemized_jackson(self):
        w = pi2_witness_form(nd(BY_NAME["jackson_skolemized"].formula))
        assert [b.name for b in w.challenges] == ["omega", "M", "eps"]
        (delta,) = w.witnesses
        assert delta.deps == ("omega", "M", "eps")
        assert "approxQ" in render(w.matrix)

    def test_pi3_rejected(self):
        with pytest.raises(NotPi2):
            pi2_witness_form(nd(BY_NAME["pi3"].formula))


def test_demorgan_or_equivalent():
    f = P("(forall x Q (or (atom P x) (exists y Q (atom R x y))))")
    g = demorgan_or(f)
    assert "(or" not in render(g)
    assert compare_all_tables(f, g, max_size=3).mismatches == 0
