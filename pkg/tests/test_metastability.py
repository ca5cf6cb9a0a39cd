from __future__ import annotations

import json
from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prooflens.metastability import (
    Affine,
    IndexOutOfRange,
    MetastabilityExhausted,
    MetastabilityProblem,
    MetastabilitySpecError,
    Table,
    load_sequence,
    metastability_search,
    metastable_refine,
    parse_bound,
    reciprocal_sequence,
)

from strategies import rationals


def naive_search(values, eps, F, start=0):
    """Direct transcription of the definition, used as the oracle."""
    last = start + len(values) - 1
    for n in range(start, last + 1):
        if F(n) > last:
            return None
        if all(abs(values[n - start] - values[m - start]) < eps for m in range(n, F(n) + 1)):
            return n
    return None


class TestSearch:
    def test_reciprocal(self):
        p = MetastabilityProblem(reciprocal_sequence(64), Q(1, 10), Affine(2, 0), start=1)
        r = metastability_search(p)
        assert r.found_n == 6 and r.stable_window == (6, 12)

    @pytest.mark.parametrize("F", [Affine(2, 0), Affine(1, 3), Affine(0, 5), Affine(5, 1)])
    def test_constant(self, F):
        p = MetastabilityProblem((Q(3, 7),) * 40, Q(1, 100), F)
        assert metastability_search(p).found_n == 0

    def test_alternating_exhausts(self):
        p = MetastabilityProblem((0, 1, 0, 1, 0, 1), Q(1, 2), Affine(1, 1))
        with pytest.raises(MetastabilityExhausted) as info:
            metastability_search(p)
        assert info.value.scanned_max == 4

    @given(st.lists(rationals(4, 1), min_size=1, max_size=20), st.integers(0, 3),
           st.integers(0, 4), st.sampled_from([Q(1, 4), Q(1, 2), Q(1)]))
    def test_matches_definition(self, values, a, b, eps):
        F = Affine(a, b)
        p = MetastabilityProblem(tuple(values), eps, F)
        expected = naive_search(values, eps, F)
        if expected is None:
            with pytest.raises(MetastabilityExhausted):
                metastability_search(p)
        else:
            assert metastability_search(p).found_n == expected


class TestRefine:
    def test_constant_is_fixed(self):
        F = Affine(2, 1)
        p = MetastabilityProblem((Q(1),) * 30, Q(1, 10), F)
        refined = metastable_refine(p)
        assert all(refined(n) == F(n) for n in range(len(refined.values)))

    def test_shifted_reciprocal(self):
        p = MetastabilityProblem(tuple(Q(1, n + 1) for n in range(12)), Q(1, 4), Affine(2, 0))
        refined = metastable_refine(p)
        assert refined.values == (0, 2, 4, 6, 8, 10)

    def test_first_violation(self):
        p = MetastabilityProblem((0, 1, 0), Q(1, 2), Table((1, 2, 2)))
        assert metastable_refine(p)(0) == 1

    @given(st.lists(rationals(4, 1), min_size=1, max_size=20), st.integers(0, 3),
           st.integers(0, 4), st.sampled_from([Q(1, 4), Q(1, 2)]))
    def test_refined_bound_properties(self, values, a, b, eps):
        F = Affine(a, b)
        p = MetastabilityProblem(tuple(values), eps, F)
        refined = metastable_refine(p)
        for n in range(len(refined.values)):
            m, window = refined(n), range(n, F(n) + 1)
            bad = [k for k in window if abs(values[n] - values[k]) >= eps]
            # An empty or stable window keeps F(n); otherwise the first breach.
            assert m == (bad[0] if bad else F(n))


class TestValidation:
    def test_eps_positive(self):
        with pytest.raises(ValueError):
            MetastabilityProblem((1,), Q(0), Affine(1, 0))

    def test_negative_bound(self):
        with pytest.raises(ValueError):
            MetastabilityProblem((1, 2), Q(1), Affine(0, -1))

    def test_out_of_range(self):
        p = MetastabilityProblem((1, 2), Q(1), Affine(1, 0))
        with pytest.raises(IndexOutOfRange):
            p.alpha(5)


class TestFormats:
    def test_parse_affine(self):
        assert parse_bound("affine:2:0") == Affine(2, 0)
        for bad in ("affine:2", "affine:x:1", "affine:-1:0", "linear:1"):
            with pytest.raises(MetastabilitySpecError):
                parse_bound(bad)

    def test_parse_table(self, tmp_path):
        (tmp_path / "t.json").write_text(json.dumps({"start": 1, "values": [2, 4, 6]}))
        t = parse_bound("table:t.json", tmp_path)
        assert t == Table((2, 4, 6), 1) and t(2) == 4
        with pytest.raises(IndexOutOfRange):
            t(0)

    def test_load_sequence(self):
        assert load_sequence('["1", "1/2"]') == (0, (Q(1), Q(1, 2)))
        assert load_sequence('{"start": 3, "values": ["1/3"]}') == (3, (Q(1, 3),))
        assert load_sequence("# header\n1/2\n\n3/4\n") == (0, (Q(1, 2), Q(3, 4)))
