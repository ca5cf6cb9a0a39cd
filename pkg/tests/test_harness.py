from __future__ import annotations

import json
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prooflens.analysis import TENT, Poly, Polynomial, Scale, l1_norm, pl, poly
from prooflens.errors import Status
from prooflens.harness import (
    ConfigError,
    EmptyGrid,
    PolyGrid,
    Report,
    best_on_grid,
    check_markov_grid,
    check_stability,
    check_uniqueness_property,
    default_config,
    enumerate_grid,
    grid_members,
    load_config,
    minimizer_gap_trend,
    nearly_best_set,
    poly_distance,
    run_instance,
    run_suite,
)

TS = "2000-01-01T00:00:00+00:00"


def exact_linear_l1(a: Q, b: Q) -> Q:
    """Exact integral of |a + b x| over [0,1]."""
    if b == 0:
        return abs(a)
    r = -a / b
    if not 0 < r < 1:
        return abs(a + b / 2)
    return (abs(a) * r + abs(a + b) * (1 - r)) / 2


def full_scan_best(f, g):
    """Oracle: certified distance of every member, minimum midpoint first."""
    best = None
    for p in enumerate_grid(g):
        d = l1_norm(f - Poly(p), g.tol)
        if best is None or d.mid < best[0]:
            best = (d.mid, p)
    return best[1]


class TestEnumerate:
    def test_constants(self):
        g = PolyGrid(0, 2, Q(1), Q(2))
        assert [p.coeffs[0] for p in enumerate_grid(g)] == [-1, Q(-1, 2), 0, Q(1, 2), 1]

    def test_zero_cap(self):
        g = PolyGrid(1, 4, Q(1), Q(0))
        assert [p.coeffs for p in enumerate_grid(g)] == [(0, 0)]

    def test_linear_filtered_by_cap(self):
        g = PolyGrid(1, 1, Q(1), Q(1, 2))
        got = [p.coeffs for p in enumerate_grid(g)]
        pairs = [(Q(a), Q(b)) for a in (-1, 0, 1) for b in (-1, 0, 1)]
        expected = [(a, b) for a, b in pairs if exact_linear_l1(a, b) <= Q(1, 2)]
        assert [Polynomial(c, 1).coeffs for c in expected] == got and len(got) == 5

    def test_lexicographic(self):
        g = PolyGrid(1, 2, Q(1))
        vecs = [p.coeffs for p in enumerate_grid(g)]
        assert vecs == sorted(vecs) and len(vecs) == 25

    def test_empty_grid_reported(self):
        g = PolyGrid(0, 1, Q(1, 2), Q(0))
        assert [p.coeffs for p in enumerate_grid(g)] == [(0,)]
        # The zero polynomial always qualifies, so only a negative cap empties a grid.
        object.__setattr__(g, "l1_cap", Q(-1))
        with pytest.raises(EmptyGrid):
            grid_members(g)
        with pytest.raises(ValueError):
            PolyGrid(0, 1, Q(1), Q(-1))

    def test_members_within_bounds(self):
        g = PolyGrid.for_function(TENT, 1, 8, 2)
        for p in enumerate_grid(g):
            assert all(abs(c) <= 2 and (c * 8).denominator == 1 for c in p.coeffs)


class TestBest:
    def test_constant_for_identity(self):
        b = best_on_grid(poly(0, 1), PolyGrid(0, 64, Q(4)))
        assert b.poly.coeffs == (Q(1, 2),) and b.distance.contains(Q(1, 4))

    def test_member_is_its_own_best(self):
        f = poly(Q(1, 4), Q(-3, 8))
        b = best_on_grid(f, PolyGrid(1, 8, Q(2)))
        assert b.poly.same_function(Polynomial((Q(1, 4), Q(-3, 8)))) and b.distance.contains(0)

    def test_zero(self):
        b = best_on_grid(poly(0), PolyGrid(1, 4, Q(1)))
        assert b.poly.is_zero

    def test_width_within_tolerance(self):
        g = PolyGrid.for_function(TENT, 1, 16, 2)
        assert best_on_grid(TENT, g).distance.width <= g.tol

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.integers(-4, 4), min_size=3, max_size=3))
    def test_matches_full_scan(self, ys):
        f = pl((0, Q(ys[0], 2)), (Q(1, 3), Q(ys[1], 2)), (1, Q(ys[2], 2)))
        g = PolyGrid(1, 4, Q(2), tol=Q(1, 4096))
        assert best_on_grid(f, g).poly == full_scan_best(f, g)

    def test_pruning_skips_work(self):
        g = PolyGrid.for_function(TENT, 1, 64, 4)
        b = best_on_grid(TENT, g)
        assert b.evaluated < len(grid_members(g)) / 10


class TestNearlyBest:
    def test_huge_delta_is_whole_grid(self):
        g = PolyGrid.for_function(TENT, 1, 4, 1)
        nb = nearly_best_set(TENT, g, 4 * l1_norm(TENT).hi + 1)
        assert len(nb.members) == len(grid_members(g)) and nb.boundary == ()

    def test_tiny_delta_singleton(self):
        g = PolyGrid.for_function(TENT, 1, 64, 4)
        nb = nearly_best_set(TENT, g, Q(1, 10**9))
        assert len(nb.members) == 1 and nb.members[0] == nb.best.poly

    def test_contains_f_on_grid(self):
        f = poly(Q(1, 2), Q(-1, 4))
        g = PolyGrid(1, 4, Q(1))
        for delta in (Q(1, 100), Q(1, 4)):
            assert any(p.same_function(Polynomial((Q(1, 2), Q(-1, 4)))) for p in
                       nearly_best_set(f, g, delta).members)

    def test_certified_membership(self):
        g = PolyGrid.for_function(TENT, 1, 16, 2)
        nb = nearly_best_set(TENT, g, Q(1, 16))
        for p in nb.members:
            assert nb.distances[p].hi < nb.threshold

    @settings(max_examples=10, deadline=None)
    @given(st.lists(st.sampled_from([Q(1, 64), Q(1, 16), Q(1, 8), Q(1, 4), Q(1, 2)]),
                    min_size=2, max_size=2))
    def test_monotone_in_delta(self, deltas):
        g = PolyGrid.for_function(TENT, 1, 16, 2)
        a, b = sorted(deltas)
        small, large = nearly_best_set(TENT, g, a), nearly_best_set(TENT, g, b)
        assert set(small.members) <= set(large.members)


class TestChecks:
    def test_uniqueness_on_grid_function(self):
        f = poly(Q(1, 4), Q(1, 2))
        g = PolyGrid.for_function(f, 1, 16, 2)
        rec = check_uniqueness_property(f, 1, Q(1, 4), g)
        assert rec.status is Status.PASS
        assert rec.witness["members"] == [["1/4", "1/2"]]

    def test_stability_identity(self):
        g = PolyGrid.for_function(TENT, 1, 16, 2)
        rec = check_stability(TENT, TENT, 1, Q(1, 4), g)
        assert rec.status is Status.PASS and rec.hi == 0

    def test_stability_gate(self):
        g = PolyGrid.for_function(TENT, 1, 16, 2)
        rec = check_stability(TENT, TENT + Scale(Q(1, 10), poly(1)), 1, Q(1, 4), g)
        assert rec.status is Status.INCONCLUSIVE

    def test_markov_small(self):
        rec = check_markov_grid(1, 4, 1)
        assert rec.status is Status.PASS and rec.witness["polynomials"] == 81

    def test_poly_distance(self):
        assert poly_distance(Polynomial((0, 1)), Polynomial((1, -1))).contains(Q(1, 2))

    def test_gap_trend_recorded(self):
        trend = minimizer_gap_trend(TENT, 1, [8, 16, 32])
        gaps = [t for _, t in trend]
        assert all(t is not None and t > 0 for t in gaps)


class TestSuite:
    def test_empty(self):
        r = run_suite({"instances": []})
        assert r.checks == [] and r.exit_code == 0
        assert r.summary == {"pass": 0, "fail": 0, "inconclusive": 0}

    def test_wrong_constant_self_test(self):
        cfg = {"instances": [{"check": "modulus", "n": 1, "omega": "linear:1", "f_l1": "1/2",
                              "eps": "1/10", "expect": "1/19906560001"}]}
        r = run_suite(cfg)
        assert r.summary["fail"] == 1 and r.exit_code == 1

    def test_right_constant(self):
        cfg = {"instances": [{"check": "modulus", "n": 1, "omega": "linear:1", "f_l1": "1/2",
                              "eps": "1/10", "expect": "1/19906560000"}]}
        assert run_suite(cfg).exit_code == 0

    def test_schema_and_determinism(self):
        cfg = {"suite": "t", "instances": [
            {"check": "metastability", "sequence": "reciprocal", "start": 1, "length": 40,
             "eps": "1/10", "F": "affine:2:0", "expect": 6},
            {"check": "reduction", "g": {"kind": "poly", "coeffs": ["-1/2", "2"]},
             "h": {"kind": "poly", "coeffs": ["1"]}, "zeta": "1/16"},
            {"check": "roundtrip"}]}
        a, b = run_suite(cfg).dumps(TS), run_suite(cfg).dumps(TS)
        assert a == b
        doc = json.loads(a)
        assert set(doc) == {"suite", "config", "checks", "summary", "timestamp"}
        for c in doc["checks"]:
            assert set(c) == {"id", "status", "lo", "hi", "witness"}
            assert c["status"] in ("pass", "fail", "inconclusive")

    def test_timestamp_is_only_difference(self):
        cfg = {"instances": [{"check": "roundtrip"}]}
        a = json.loads(run_suite(cfg).dumps())
        b = json.loads(run_suite(cfg).dumps(TS))
        a.pop("timestamp"), b.pop("timestamp")
        assert a == b

    @pytest.mark.parametrize("cfg", [[], {"instances": {}}, {"instances": [{"x": 1}]},
                                     {"instances": [{"check": "nope"}]},
                                     {"instances": [{"check": "modulus"}]}])
    def test_config_errors(self, cfg):
        with pytest.raises(ConfigError):
            run_suite(cfg)

    def test_load_config(self):
        with pytest.raises(ConfigError):
            load_config("{not json")
        assert load_config('{"instances": []}') == {"instances": []}

    def test_default_config_covers_every_kind(self):
        kinds = {i["check"] for i in default_config()["instances"]}
        assert kinds >= {"roundtrip", "nd_equivalence", "markov", "reduction", "uniqueness",
                         "stability", "q_contract", "metastability"}

    def test_other_instance_kinds(self):
        recs = run_instance({"check": "near_zeros", "f": "tent", "n": 1, "p": ["1/2", "0"],
                             "zeta": "1/64"})
        assert recs[0].status is Status.PASS
        recs = run_instance({"check": "sup_from_l1", "q": {"kind": "scale", "c": "1/1000000",
                                                            "arg": {"kind": "poly", "coeffs": ["1"]}},
                             "omega": "linear:1", "eps": "1/10"})
        assert recs[0].status is Status.PASS

    def test_report_summary(self):
        r = Report("x", {})
        assert r.to_json(TS)["summary"] == {"pass": 0, "fail": 0, "inconclusive": 0}
