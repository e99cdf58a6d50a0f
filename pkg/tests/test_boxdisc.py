import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodisc import boxdisc as bd
from geodisc.pointset import UnitCubePoints, random_uniform, sobol_net, van_der_corput
from oracles import grid_star_disc, lq_1d_quadrature, mc_l2_squared


def pts(*rows):
    return UnitCubePoints(np.array(rows, dtype=float).reshape(len(rows), -1))


class TestDiscrepancyResult:
    def test_exact_has_no_hint(self):
        with pytest.raises(ValueError):
            bd.DiscrepancyResult(0.1, "anchored_box", 2.0, "exact", error_hint=0.01)

    def test_value_range(self):
        with pytest.raises(ValueError):
            bd.DiscrepancyResult(1.5, "anchored_box", 2.0, "exact")

    def test_bad_tags(self):
        with pytest.raises(ValueError):
            bd.DiscrepancyResult(0.1, "boxes", 2.0, "exact")
        with pytest.raises(ValueError):
            bd.DiscrepancyResult(0.1, "convex", 2.0, "guess")

    def test_row(self):
        r = bd.DiscrepancyResult(0.25, "anchored_box", math.inf, "exact", n_points=4, dim=1)
        assert r.as_row() == ["anchored_box", "inf", "exact", "4", "1", "0.25", ""]


class TestLocal:
    def test_single_point(self):
        assert bd.local_box_discrepancy(pts(0.5), [0.5]) == 0.5

    def test_full_box(self):
        assert bd.local_box_discrepancy(random_uniform(30, 3, 1), [1, 1, 1]) == 0.0

    def test_origin_box(self):
        P = pts([0, 0], [0, 0.3], [0.2, 0.1])
        assert bd.local_box_discrepancy(P, [0, 0]) == pytest.approx(1 / 3)

    def test_open_box(self):
        assert bd.local_box_discrepancy(pts(0.5), [0.5], closed=False) == -0.5

    def test_anchor_outside(self):
        with pytest.raises(ValueError):
            bd.local_box_discrepancy(pts(0.5), [1.2])


class TestStar1D:
    def test_single(self):
        assert bd.star_disc_1d_exact(pts(0.5)).value == 0.5

    def test_four(self):
        assert bd.star_disc_1d_exact(pts(0, 0.5, 0.25, 0.75)).value == 0.25

    def test_four_vs_fine_grid(self):
        assert grid_star_disc(np.array([[0], [.5], [.25], [.75]]), 1 << 20) == pytest.approx(0.25, abs=1e-6)

    def test_centered_lattice(self):
        P = UnitCubePoints(((2 * np.arange(1, 6) - 1) / 10).reshape(-1, 1))
        assert bd.star_disc_1d_exact(P).value == pytest.approx(0.1, abs=1e-15)

    def test_needs_s1(self):
        with pytest.raises(ValueError):
            bd.star_disc_1d_exact(pts([0.1, 0.2]))


class TestStarGrid:
    def test_center_point(self):
        assert bd.star_disc_grid_exact(pts([0.5, 0.5])).value == 0.75

    def test_origin_point(self):
        assert bd.star_disc_grid_exact(pts([0.0, 0.0])).value == 1.0

    def test_s1_agrees(self):
        for seed in range(20):
            P = random_uniform(1 + seed * 7, 1, seed)
            assert abs(bd.star_disc_grid_exact(P).value - bd.star_disc_1d_exact(P).value) <= 1e-12

    @pytest.mark.parametrize("s,N,seed", [(2, 17, 1), (2, 64, 2), (3, 9, 3), (3, 40, 4)])
    def test_random_vs_grid(self, s, N, seed):
        g = 256 if s == 2 else 64
        P = random_uniform(N, s, seed)
        exact = bd.star_disc_grid_exact(P).value
        lower = grid_star_disc(P.coords, g)
        assert lower <= exact + 1e-12 and exact - lower <= s / g

    @pytest.mark.parametrize("s,g,seed", [(2, 16, 0), (2, 32, 1), (3, 8, 2), (3, 16, 3)])
    def test_dyadic_points_match_grid_exactly(self, s, g, seed):
        # with coordinates on the grid, the grid brute force is exact
        rng = np.random.default_rng(seed)
        P = UnitCubePoints(rng.integers(0, g, size=(25, s)) / g)
        assert bd.star_disc_grid_exact(P).value == pytest.approx(grid_star_disc(P.coords, g), abs=1e-12)

    def test_duplicates(self):
        P = pts([0.5, 0.5], [0.5, 0.5], [0.5, 0.5])
        assert bd.star_disc_grid_exact(P).value == 0.75

    def test_budget(self):
        with pytest.raises(bd.BudgetExceededError):
            bd.star_disc_grid_exact(random_uniform(129, 3, 0))
        assert bd.star_disc_grid_exact(random_uniform(129, 3, 0), max_points=200).value > 0

    def test_dimension_limit(self):
        with pytest.raises(ValueError):
            bd.star_disc_grid_exact(random_uniform(5, 4, 0))


class TestStarEstimate:
    def test_zero_candidates(self):
        assert bd.star_disc_estimate(random_uniform(10, 2, 0), 0).value == 0.0

    def test_single_point(self):
        assert bd.star_disc_estimate(pts(0.5), 10).value == 0.5

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_lower_bound_and_nested(self, s):
        P = random_uniform(30, s, s)
        exact = bd.star_disc_grid_exact(P).value
        prev = 0.0
        for n in (1, 5, 50, 500, 5000):
            v = bd.star_disc_estimate(P, n, seed=7).value
            assert prev <= v <= exact + 1e-12
            prev = v

    def test_high_dimension(self):
        r = bd.star_disc_estimate(sobol_net(6, 6), 2000)
        assert r.method == "lower_bound" and 0 < r.value <= 1


class TestL2:
    def test_origin(self):
        assert bd.l2_star_closed_form(pts(0.0)).value ** 2 == pytest.approx(1 / 3, abs=1e-15)

    def test_near_one(self):
        assert bd.l2_star_closed_form(pts(1 - 1e-12)).value ** 2 == pytest.approx(1 / 3, abs=1e-10)

    def test_sobol_vs_mc(self):
        P = sobol_net(3, 2)
        mean, se = mc_l2_squared(P.coords, 1_000_000, 5)
        assert abs(bd.l2_star_closed_form(P).value ** 2 - mean) <= 3 * se

    def test_matches_1d_exact(self):
        for seed in range(30):
            P = random_uniform(1 + 8 * seed, 1, seed)
            assert abs(bd.l2_star_closed_form(P).value - bd.lq_disc_1d_exact(P, 2).value) <= 1e-12

    def test_block_invariance(self):
        P = random_uniform(300, 2, 4)
        a = bd.l2_star_closed_form(P).value
        X = P.coords
        pair = sum(np.prod(1 - np.maximum(X[i], X), axis=1).sum() for i in range(len(X)))
        b = math.sqrt(1 / 9 - 2 / 300 * np.prod((1 - X**2) / 2, axis=1).sum() + pair / 300**2)
        assert a == pytest.approx(b, abs=1e-13)


class TestLq1D:
    def test_half_q2(self):
        assert bd.lq_disc_1d_exact(pts(0.5), 2).value == pytest.approx(1 / math.sqrt(12), abs=1e-15)

    def test_half_q1(self):
        assert bd.lq_disc_1d_exact(pts(0.5), 1).value == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("q", [1.0, 1.5, 3.0, 7.0])
    def test_vs_quadrature(self, q):
        P = random_uniform(13, 1, 2)
        assert bd.lq_disc_1d_exact(P, q).value == pytest.approx(lq_1d_quadrature(P.coords, q), abs=1e-6)

    def test_bad_q(self):
        with pytest.raises(ValueError):
            bd.lq_disc_1d_exact(pts(0.5), 0.5)
        with pytest.raises(ValueError):
            bd.lq_disc_1d_exact(pts(0.5), math.inf)


class TestLqMC:
    @pytest.mark.parametrize("q", [1.0, 2.0, 4.0])
    def test_vs_1d_exact(self, q):
        P = random_uniform(20, 1, 3)
        r = bd.lq_disc_mc(P, q, 200_000, seed=1)
        assert abs(r.value - bd.lq_disc_1d_exact(P, q).value) <= 3 * r.error_hint

    def test_vs_closed_form(self):
        P = random_uniform(40, 3, 3)
        r = bd.lq_disc_mc(P, 2, 200_000, seed=2)
        assert abs(r.value - bd.l2_star_closed_form(P).value) <= 3 * r.error_hint

    def test_single_sample(self):
        P = random_uniform(10, 2, 1)
        r = bd.lq_disc_mc(P, 2, 1, seed=9)
        from geodisc.pointset import make_rng
        t = make_rng(9).random((1, 2))[0]
        assert r.value == pytest.approx(abs(bd.local_box_discrepancy(P, t)), abs=1e-15)


class TestKoksma:
    def test_linear_midpoint(self):
        f = bd.builtin_functions()[0]
        rep = bd.koksma_check(f, pts(0.5), math.inf)
        assert rep.lhs == 0 and rep.holds

    def test_square_at_origin(self):
        # ||f'||_1 = 1 pairs with the star discrepancy D* = 1
        f = bd.builtin_functions()[1]
        rep = bd.koksma_check(f, pts(0.0), 1)
        assert rep.lhs == pytest.approx(1 / 3) and rep.rhs == pytest.approx(1.0) and rep.holds

    def test_square_at_origin_sup_norm(self):
        # ||f'||_inf = 2 pairs with the L1 discrepancy 1/2
        rep = bd.koksma_check(bd.builtin_functions()[1], pts(0.0), math.inf)
        assert rep.q == 1 and rep.rhs == pytest.approx(1.0) and rep.holds

    def test_sine_vdc(self):
        f = [g for g in bd.builtin_functions() if g.name == "sine"][0]
        assert bd.koksma_check(f, van_der_corput(64), 2).holds

    def test_mismatched_pair(self):
        with pytest.raises(ValueError):
            bd.koksma_check(bd.builtin_functions()[0], pts(0.5), 2, q=3)

    @pytest.mark.parametrize("f", bd.builtin_functions(), ids=lambda f: f.name)
    def test_norms_and_integrals(self, f):
        from scipy import integrate
        assert f.integral == pytest.approx(integrate.quad(f.f, 0, 1, limit=200)[0], abs=1e-10)
        for p, val in f.norms.items():
            if math.isinf(p):
                grid = np.linspace(0, 1, 200_001)
                assert val == pytest.approx(np.max(np.abs(f.f_prime(grid))), rel=1e-6)
            else:
                num = integrate.quad(lambda t: abs(f.f_prime(t)) ** p, 0, 1, points=[0.3], limit=200)[0]
                assert val == pytest.approx(num ** (1 / p), rel=1e-8)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(1, 60), seed=st.integers(0, 10**6))
def test_q_monotone(N, seed):
    P = random_uniform(N, 1, seed)
    vals = [bd.lq_disc_1d_exact(P, q).value for q in (1, 1.5, 2, 3, 8)]
    vals.append(bd.star_disc_1d_exact(P).value)
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 40), s=st.integers(1, 3), seed=st.integers(0, 10**6))
def test_permutation_invariance(N, s, seed):
    P = random_uniform(N, s, seed)
    Q = UnitCubePoints(P.coords[np.random.default_rng(seed).permutation(N)])
    assert bd.star_disc_grid_exact(P).value == bd.star_disc_grid_exact(Q).value
    assert abs(bd.l2_star_closed_form(P).value - bd.l2_star_closed_form(Q).value) <= 1e-14
