from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from prooflens.corpus import BY_NAME, CORPUS
from prooflens.dialectica import embed, nd
from prooflens.formula import parse_file, prenex, render
from prooflens.models import (
    CarrierTooLarge,
    Carriers,
    FiniteModel,
    TableSpace,
    abstract_atoms,
    compare_all_tables,
    finite_model_eval,
    nd_equivalence,
    predicate_domains,
    pull_functions,
    reduce_witnesses,
)

from strategies import formula_text

PREAMBLE = "(predicates (P 1) (R 2) (P2 2) (P3 3))"


def P(text: str):
    return parse_file(PREAMBLE + "\n" + text).formula


def brute_force_count(f, sizes) -> int:
    """Tables satisfying ``f``, by enumerating them one by one."""
    preds = predicate_domains(f)
    carriers = Carriers(sizes)
    cells = [(p, args) for p, doms in sorted(preds.items())
             for args in itertools.product(*(carriers.elements(d) for d in doms))]
    count = 0
    for bits in itertools.product((False, True), repeat=len(cells)):
        tables = {p: [] for p in preds}
        for (p, args), b in zip(cells, bits):
            if b:
                tables[p].append(args)
        count += finite_model_eval(f, FiniteModel(sizes, tables))
    return count


class TestFiniteModel:
    def test_exists(self):
        f = P("(exists y Q (atom P y))")
        assert finite_model_eval(f, FiniteModel({"Q": 2}, {"P": [(1,)]}))
        assert not finite_model_eval(f, FiniteModel({"Q": 2}, {"P": []}))

    def test_diagonal(self):
        f = P("(forall x Q (exists y Q (atom R x y)))")
        assert finite_model_eval(f, FiniteModel({"Q": 2}, {"R": [(0, 0), (1, 1)]}))

    def test_function_quantifier(self):
        f = P("(exists Y (fun Q Q) (forall x Q (atom R x (Y x))))")
        m = FiniteModel({"Q": 2}, {"R": [(0, 1), (1, 0)]})
        assert finite_model_eval(f, m)


class TestTableSpace:
    @settings(max_examples=30, deadline=None)
    @given(formula_text(max_depth=3, max_quantifiers=2))
    def test_bdd_count_matches_brute_force(self, text):
        f = P(text)
        for n in (1, 2):
            sizes = {"Q": n}
            space = TableSpace(Carriers(sizes), predicate_domains(f))
            if space.bits > 12:
                continue
            assert space.count(space.evaluate(f)) == brute_force_count(f, sizes)

    def test_counterexample_tables_really_disagree(self):
        f = P("(forall x Q (exists y Q (atom R x y)))")
        g = P("(exists y Q (forall x Q (atom R x y)))")
        r = compare_all_tables(f, g, max_size=2)
        ce = r.counterexample
        m = FiniteModel(ce["sizes"], ce["tables"])
        assert finite_model_eval(f, m) != finite_model_eval(g, m)


class TestCarriers:
    def test_function_space_is_all_maps(self):
        c = Carriers({"Q": 2})
        fq = P("(forall Y (fun Q Q) (atom P (Y x)))").domain
        assert len(c.elements(fq)) == 4 and c.size(fq) == 4

    def test_cap(self):
        c = Carriers({"Q": 3}, cap=10)
        fq = P("(forall Y (fun Q Q) (atom P (Y x)))").domain
        with pytest.raises(CarrierTooLarge):
            c.elements(fq)

    def test_size_overflow_guard(self):
        deep = P("(forall Y (fun (fun (fun Q Q) Q) Q) (atom P Y))").domain
        with pytest.raises(OverflowError):
            Carriers({"Q": 3}).size(deep)


class TestReductions:
    """Choice-based reductions are checked against the plain re-quantified
    form on every table, for carriers where both can be evaluated."""

    @pytest.mark.parametrize("name", ["pi2", "pi3", "pi3_functional", "exists_first", "ucont",
                                      "approxQ", "L1", "quantifier_free"])
    def test_reduce_matches_embed(self, name):
        body, _ = abstract_atoms(BY_NAME[name].formula)
        d = nd(body)
        reduced = pull_functions(reduce_witnesses(d))
        r = compare_all_tables(embed(d), reduced, max_size=2)
        assert r.mismatches == 0 and r.exhaustive

    @pytest.mark.parametrize("name", ["cont", "metastability"])
    def test_reduce_matches_embed_where_evaluable(self, name):
        body, _ = abstract_atoms(BY_NAME[name].formula)
        d = nd(body)
        r = compare_all_tables(embed(d), pull_functions(reduce_witnesses(d)), max_size=2)
        assert r.mismatches == 0 and r.assignments > 0

    @settings(max_examples=30, deadline=None)
    @given(formula_text(max_depth=3, max_quantifiers=2))
    def test_pull_functions_random(self, text):
        f = P(text)
        d = nd(f)
        r = compare_all_tables(embed(d), pull_functions(prenex(embed(d))), max_size=2)
        assert r.mismatches == 0, r.counterexample

    def test_pull_functions_removes_function_quantifier(self):
        f = P("(forall x Q (exists Y (fun Q Q) (atom R x (Y x))))")
        g = pull_functions(f)
        assert "fun" not in render(g)
        assert compare_all_tables(f, g, max_size=3).mismatches == 0

    def test_unused_quantifier_dropped(self):
        f = P("(forall x Q (exists Y (fun Q Q) (atom P x)))")
        assert "Y" not in render(pull_functions(f))


class TestCorpusND:
    @pytest.mark.parametrize("entry", [e for e in CORPUS if e.nd_checkable], ids=lambda e: e.name)
    def test_exhaustive_at_size_two(self, entry):
        r = nd_equivalence(entry.formula, max_size=2)
        assert r.mismatches == 0 and r.exhaustive

    def test_checkable_count(self):
        assert sum(e.nd_checkable for e in CORPUS) == 14
