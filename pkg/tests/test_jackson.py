from __future__ import annotations

from fractions import Fraction as Q

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from prooflens.analysis import (
    TENT,
    Linear,
    Poly,
    Polynomial,
    Scale,
    l1_norm,
    poly,
    sup_norm,
)
from prooflens.errors import Status
from prooflens.jackson import (
    GridTooCoarse,
    ReductionWitness,
    assembled_q_modulus,
    averaged_gap,
    build_cover,
    displayed_q_modulus,
    find_near_zeros,
    lipschitz_q_modulus,
    near_best_threshold,
    separation,
    stability_radius,
    sup_from_l1,
    uniqueness_modulus,
    verify_reduction,
)

from strategies import positive_rationals

unit = st.builds(lambda a: Q(a, 256), st.integers(0, 256))


def exact_linear_l1(a: Q, b: Q) -> Q:
    """Exact integral of |a + b x| over [0,1]."""
    if b == 0:
        return abs(a)
    r = -a / b
    if not 0 < r < 1:
        return abs(a + b / 2)
    return (abs(a) * r + abs(a + b) * (1 - r)) / 2


class TestCover:
    def test_no_small_values(self):
        c = build_cover(poly(1), Q(1, 2))
        assert c.intervals == () and c.total_measure == 0

    def test_zero_function(self):
        c = build_cover(poly(0), Q(1, 5), 64)
        assert c.intervals == ((0, 1),) and c.total_measure == 1

    def test_linear_neighbourhood(self):
        c = build_cover(poly(-1, 2), Q(1, 8), 64)
        assert len(c.intervals) == 1
        a, b = c.intervals[0]
        assert a < Q(1, 2) < b
        # {|2x-1| < 1/8} has measure 1/8; the grid cover adds two steps of slack.
        assert Q(1, 8) <= c.total_measure <= Q(1, 8) + Q(4, 64)

    def test_grid_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            build_cover(poly(0, 100), Q(1, 8), 4)

    @settings(max_examples=100)
    @given(st.lists(st.builds(lambda a: Q(a, 4), st.integers(-8, 8)), min_size=1, max_size=3),
           st.sampled_from([Q(1, 4), Q(1, 8)]), unit)
    def test_every_small_point_is_covered(self, coeffs, zeta, x):
        g = poly(*coeffs)
        c = build_cover(g, zeta, 1024)
        if abs(g(x)) < zeta:
            assert c.covers(x)


class TestReduction:
    def test_infeasible_eps_one_twelfth_is_gated(self):
        g = poly(-1, 2)
        B = build_cover(g, Q(1, 8), 64)
        r = verify_reduction(g, g, Q(1, 12), Q(1, 8), 1, B, Q(1, 4096))
        # Any cover of {|2x-1| < 1/8} has measure at least 1/8 > 1/12.
        assert r.status is Status.INCONCLUSIVE and "measure" in r.reason

    def test_same_pair_with_feasible_eps(self):
        g = poly(-1, 2)
        B = build_cover(g, Q(1, 16), 256)
        r = verify_reduction(g, g, Q(1, 6), Q(1, 16), 1, B, Q(1, 4096))
        assert r.status is Status.PASS
        lam = r.witness.lam
        assert lam == Q(1, 32) and r.witness.gap == Q(1, 6) * Q(1, 32)
        # Oracle: ||g - lam g||_1 = (1 - lam)/2 exactly.
        assert exact_linear_l1(-1 + lam, 2 - 2 * lam) + r.witness.gap <= Q(1, 2)

    def test_negative_integral_flips_lambda(self):
        g, h = poly(Q(-1, 2), 2), poly(-1)
        B = build_cover(g, Q(1, 16), 256)
        r = verify_reduction(g, h, B.total_measure, Q(1, 16), 1, B, Q(1, 4096))
        assert r.status is Status.PASS and r.witness.lam == Q(-1, 32)
        lhs = exact_linear_l1(Q(-1, 2) + r.witness.lam, Q(2))
        assert lhs + r.witness.gap <= exact_linear_l1(Q(-1, 2), Q(2))

    def test_zero_h_is_gated(self):
        g = poly(-1, 2)
        B = build_cover(g, Q(1, 16), 256)
        r = verify_reduction(g, poly(0), Q(1, 6), Q(1, 16), 1, B)
        assert r.status is Status.INCONCLUSIVE

    def test_small_integral_is_gated(self):
        g = poly(-1, 2)
        B = build_cover(g, Q(1, 16), 256)
        r = verify_reduction(g, poly(1), Q(1, 6), Q(1, 16), 1, B)
        assert r.status is Status.INCONCLUSIVE and "3K eps" in r.reason

    def test_sup_bound_gated(self):
        g = poly(-1, 2)
        B = build_cover(g, Q(1, 16), 256)
        r = verify_reduction(g, poly(0, 4), Q(1, 6), Q(1, 16), 1, B)
        assert r.status is Status.INCONCLUSIVE and "sup" in r.reason

    def test_foreign_cover_rejected(self):
        B = build_cover(poly(0, 1), Q(1, 16), 256)
        r = verify_reduction(poly(-1, 2), poly(1), Q(1, 6), Q(1, 16), 1, B)
        assert r.status is Status.INCONCLUSIVE

    def test_witness_invariant(self):
        with pytest.raises(ValueError):
            ReductionWitness(Q(0), Q(1))
        with pytest.raises(ValueError):
            ReductionWitness(Q(1), Q(0))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(-8, 8), st.integers(1, 8), st.sampled_from([1, -1]))
    def test_linear_instances_against_exact_norms(self, a, b, sign):
        ga, gb = Q(a, 8), Q(b * sign, 2)
        g, h = poly(ga, gb), poly(sign)
        zeta = Q(1, 16)
        B = build_cover(g, zeta, 512)
        eps = B.total_measure
        assume(eps > 0)
        r = verify_reduction(g, h, eps, zeta, 1, B, Q(1, 4096))
        if r.status is Status.PASS:
            lam = r.witness.lam
            assert exact_linear_l1(ga - lam * sign, gb) + r.witness.gap <= exact_linear_l1(ga, gb)


class TestNearZeros:
    def test_zero_residual(self):
        p = Polynomial((0, 1), 1)
        r = find_near_zeros(Poly(p), p, 1, Q(1, 100))
        assert r.status is Status.PASS
        N = r.grid_denominator
        assert r.found == (0, Q(-(-N // 180), N))
        assert r.found[1] - r.found[0] >= separation(1)
        assert r.certificate.validate(Poly(p), p)

    def test_residual_bounded_away(self):
        r = find_near_zeros(poly(1), Polynomial((0,), 1), 1, Q(1, 4))
        assert r.status is Status.FAIL and r.found == () and not r.defect

    def test_defect_flag(self):
        r = find_near_zeros(poly(1), Polynomial((0,), 1), 1, Q(1, 4), certified_nearly_best=True)
        assert r.defect

    def test_tent_best_linear(self):
        p = Polynomial((Q(1, 2), 0), 1)
        r = find_near_zeros(TENT, p, 1, Q(1, 64))
        assert r.status is Status.PASS and len(r.found) == 2
        assert r.found[1] - r.found[0] >= Q(1, 180)
        assert all(abs(TENT(x) - p(x)) <= Q(1, 64) for x in r.found)

    def test_constants(self):
        assert separation(1) == Q(1, 180)
        assert near_best_threshold(Q(1), 1) == Q(1, 180)


class TestSupFromL1:
    def test_zero(self):
        for eps in (Q(1, 3), Q(1, 1000)):
            assert sup_from_l1(poly(0), Linear(1), eps).holds

    def test_precondition_fails(self):
        q = Scale(Q(1, 100), poly(-1, 2))
        assert sup_from_l1(q, Linear(50), Q(1, 4)).status is Status.INCONCLUSIVE

    def test_tiny_constant(self):
        r = sup_from_l1(Scale(Q(1, 10**6), poly(1)), Linear(1), Q(1, 10))
        assert r.holds and r.bound == Q(1, 400) and r.sup.contains(Q(1, 10**6))


def closed_form_phi(n: int, c: Q, F: Q, eps: Q) -> Q:
    """Closed form written out independently of the implementation."""
    zeta = eps / (4 * (n + 1) * Q(20) ** n * Q(n + 2) ** (2 * n) * Q(n) ** n)
    return zeta / 2 * min(Q(1, 10 * (n + 2) ** 2), (zeta / 12) / c,
                          zeta / (24 * n * n * (n + 1) ** 2 * F))


class TestUniquenessModulus:
    def test_check_value(self):
        phi = uniqueness_modulus(1, Linear(1), Q(1, 2))
        assert phi.zeta(Q(1, 10)) == Q(1, 14400)
        assert phi(Q(1, 10)) == Q(1, 96 * 14400**2) == Q(1, 19906560000)

    @given(st.integers(1, 3), positive_rationals(8, 8), positive_rationals(8, 4),
           positive_rationals(16, 1))
    def test_matches_closed_form(self, n, c, F, eps):
        assert uniqueness_modulus(n, Linear(c), F)(eps) == closed_form_phi(n, c, F, eps)

    @given(st.integers(1, 3), positive_rationals(8, 8), positive_rationals(8, 4),
           positive_rationals(16, 2), positive_rationals(16, 2))
    def test_positive_monotone_and_small(self, n, c, F, a, b):
        phi = uniqueness_modulus(n, Linear(c), F)
        lo, hi = sorted((a, b))
        assert 0 < phi(lo) <= phi(hi)
        assert phi(lo) <= lo

    def test_stability_radius(self):
        phi = uniqueness_modulus(1, Linear(1), Q(1, 2))
        assert stability_radius(phi, Q(1, 10)) == phi(Q(1, 10)) / 2
        assert stability_radius(phi, Q(1, 10)) <= stability_radius(phi, Q(1, 5)) < Q(1, 5)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            uniqueness_modulus(0, Linear(1), 1)
        with pytest.raises(ValueError):
            uniqueness_modulus(1, Linear(1), 0)
        with pytest.raises(ValueError):
            uniqueness_modulus(1, Linear(1), 1)(0)


class TestQModulus:
    """The auxiliary function of the uniqueness argument."""

    p1, p2 = Polynomial((Q(1, 2), 0), 1), Polynomial((Q(1, 4), Q(1, 2)), 1)

    def test_average_gap_is_nonnegative(self):
        q = averaged_gap(TENT, self.p1, self.p2)
        assert all(q(Q(k, 64)) >= 0 for k in range(65))
        assert l1_norm(q).lo >= 0

    @pytest.mark.parametrize("build", [assembled_q_modulus, lipschitz_q_modulus])
    @settings(max_examples=100, deadline=None)
    @given(x=unit, t=st.integers(-99, 99), delta=positive_rationals(16, 1))
    def test_moduli_are_sound_on_samples(self, build, x, t, delta):
        f_l1 = l1_norm(TENT).hi
        w = build(1, TENT.modulus(), f_l1)
        y = min(max(x + Q(t, 100) * w(delta), Q(0)), Q(1))
        for p1, p2 in [(self.p1, self.p2), (Polynomial((0, 1), 1), Polynomial((Q(1, 3), 0), 1))]:
            q = averaged_gap(TENT, p1, p2)
            assert abs(q(x) - q(y)) < delta

    def test_displayed_and_assembled_differ_by_two(self):
        w_f = Linear(2)
        a = assembled_q_modulus(1, w_f, Q(1, 2))
        d = displayed_q_modulus(1, w_f, Q(1, 2))
        for k in range(1, 17):
            delta = Q(k, 16)
            assert d(delta) == 2 * a(delta)

    def test_sup_norm_of_tent_gap(self):
        q = averaged_gap(TENT, self.p1, self.p2)
        assert sup_norm(q).hi <= 1
