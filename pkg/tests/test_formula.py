from __future__ import annotations

import pytest
from hypothesis import given, settings

from prooflens.corpus import BY_NAME, CORPUS
from prooflens.formula import (
    Atom,
    Complexity,
    DomainKind,
    Exists,
    ForAll,
    FormulaSyntaxError,
    Not,
    ReboundVariableError,
    alternations,
    classify,
    parse,
    parse_file,
    prenex,
    render,
    render_file,
    split_prefix,
)
from prooflens.models import compare_all_tables

from strategies import PREAMBLE, formula_text


def sig():
    return parse_file(PREAMBLE + "\n(atom P x)").signature


def P(text: str):
    return parse(text, sig())


class TestParse:
    def test_compact_interval_binder(self):
        f = parse("(forall x (Qc 0 1) (atom lt (g x) eps))")
        assert isinstance(f, ForAll) and f.var == "x"
        assert f.domain.kind is DomainKind.COMPACT and f.domain.descriptor == "Q∩[0,1]"
        assert isinstance(f.body, Atom) and f.body.pred == "lt"

    def test_nested_countable(self):
        f = parse("(forall eps Qplus (exists delta Qplus (atom approxQ f eps delta)))")
        assert isinstance(f, ForAll) and isinstance(f.body, Exists)
        assert f.domain.descriptor == "Q+" and f.body.domain.kind is DomainKind.COUNTABLE

    def test_rebound_variable(self):
        text = "(domains (D countable))\n(predicates (p 0))\n(exists x D (exists x D (atom p)))"
        with pytest.raises(ReboundVariableError):
            parse_file(text)

    @pytest.mark.parametrize("text", [
        "(forall x Q (atom lt x)",
        "(forall x Q)",
        "(frobnicate x)",
        "",
    ])
    def test_syntax_errors(self, text):
        with pytest.raises(Exception):
            parse(text)

    def test_syntax_error_has_position(self):
        with pytest.raises(FormulaSyntaxError) as info:
            parse("(forall x Q (atom lt x y)))")
        assert "1" in str(info.value)


class TestRender:
    def test_atom(self):
        assert render(parse("(atom lt a b)")) == "(atom lt a b)"

    @pytest.mark.parametrize("entry", CORPUS, ids=lambda e: e.name)
    def test_corpus_round_trip(self, entry):
        assert render_file(parse_file(entry.text)) == entry.text

    def test_corpus_size(self):
        assert len(CORPUS) == 20
        assert {"ucont", "approxQ", "jackson_skolemized"} <= set(BY_NAME)

    @given(formula_text())
    def test_round_trip_random(self, text):
        f = P(text)
        assert render(f) == text
        assert P(render(f)) == f

    def test_whitespace_is_canonicalised(self):
        messy = "(forall   x\n Q\t(atom P x))"
        assert render(P(messy)) == "(forall x Q (atom P x))"


class TestPrenex:
    def test_already_prenex(self):
        f = P("(exists y Q (atom P y))")
        assert prenex(f) == f

    def test_negated_existential(self):
        assert render(prenex(P("(not (exists y Q (atom P y)))"))) == \
            "(forall y Q (not (atom P y)))"

    def test_zero_count_hypothesis_pulls_zeta_delta_forward(self):
        f = BY_NAME["zero_count_rephrased"].formula
        prefix, _ = split_prefix(prenex(f))
        kinds = [(q.kind, q.var) for q in prefix if q.var in ("zeta", "delta")]
        assert kinds == [("forall", "zeta"), ("exists", "delta")]

    @settings(max_examples=60, deadline=None)
    @given(formula_text())
    def test_prenex_is_equivalent_on_all_tables(self, text):
        f = P(text)
        r = compare_all_tables(f, prenex(f), max_size=2)
        assert r.mismatches == 0 and r.exhaustive

    @given(formula_text())
    def test_prenex_has_quantifier_free_matrix(self, text):
        _, matrix = split_prefix(prenex(P(text)))
        assert "forall" not in render(matrix) and "exists" not in render(matrix)


class TestClassify:
    def test_pi2(self):
        f = parse("(forall n N (exists m N (atom lt n m)))")
        assert classify(f).value is Complexity.PI2

    def test_pi3(self):
        assert classify(BY_NAME["pi3"].formula).value is Complexity.PI3

    def test_skolemized_jackson_is_pi2(self):
        assert classify(BY_NAME["jackson_skolemized"].formula).value is Complexity.PI2

    def test_compact_tail_does_not_count(self):
        f = parse("(forall e Qplus (exists d Qplus (forall x (Qc 0 1) (atom lt x d))))")
        assert classify(f).value is Complexity.PI2

    def test_quantifier_free_is_pi1(self):
        assert classify(Not(parse("(atom lt a b)"))).value is Complexity.PI1

    def test_alternations(self):
        assert alternations(BY_NAME["pi3"].formula) == 2
        assert alternations(BY_NAME["pi1"].formula) == 0
