import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodisc import geomdisc as gd
from geodisc.boxdisc import BudgetExceededError, star_disc_grid_exact
from geodisc.pointset import UnitCubePoints, fibonacci_lattice, random_uniform
from oracles import sutherland_hodgman_area


def pts(*rows):
    return UnitCubePoints(np.array(rows, dtype=float))


def random_line_lower_bound(X, n_lines, seed):
    """sup |Delta| over random lines, areas from polygon clipping."""
    rng = np.random.default_rng(seed)
    N = len(X)
    best = 0.0
    for _ in range(n_lines):
        th = rng.uniform(0, 2 * math.pi)
        a, b = math.cos(th), math.sin(th)
        c = rng.uniform(-1.5, 1.5)
        r = X @ np.array([a, b]) - c
        area = sutherland_hodgman_area(a, b, c)
        best = max(best, np.count_nonzero(r <= 0) / N - area, area - np.count_nonzero(r < 0) / N)
    return best


class TestArea:
    def test_matches_clipping(self):
        rng = np.random.default_rng(0)
        for _ in range(2000):
            a, b = rng.normal(size=2)
            c = rng.uniform(-2, 2)
            assert gd.halfplane_square_area(a, b, c) == pytest.approx(sutherland_hodgman_area(a, b, c), abs=1e-13)

    @pytest.mark.parametrize("a,b,c,area", [(1, 0, 0.3, 0.3), (0, -1, -0.25, 0.75), (1, 1, 1, 0.5),
                                            (1, 1, 3, 1.0), (1, 1, -0.1, 0.0), (0, 0, 1, 1.0)])
    def test_known(self, a, b, c, area):
        assert gd.halfplane_square_area(a, b, c) == pytest.approx(area, abs=1e-15)

    def test_polygon_clipping(self):
        poly = gd.ConvexPolygon(((-.5, -.5), (1.5, -.5), (1.5, 1.5), (-.5, 1.5)))
        assert poly.area() == pytest.approx(1.0)
        tri = gd.ConvexPolygon(((0, 0), (1, 0), (0, 1)))
        assert tri.area() == pytest.approx(0.5)


class TestTestSets:
    def test_polygon_must_be_ccw(self):
        with pytest.raises(ValueError):
            gd.ConvexPolygon(((0, 0), (0, 1), (1, 0)))

    def test_polygon_rejects_collinear(self):
        with pytest.raises(ValueError):
            gd.ConvexPolygon(((0, 0), (0.5, 0), (1, 0), (0, 1)))

    def test_disc_radius(self):
        with pytest.raises(ValueError):
            gd.TorusDisc((0.5, 0.5), 0.6)

    def test_halfplane_normal(self):
        with pytest.raises(ValueError):
            gd.HalfPlane((0, 0), 1.0)

    def test_disc_wraps(self):
        D = gd.TorusDisc((0.0, 0.0), 0.1)
        assert D.contains(np.array([[0.95, 0.02], [0.5, 0.5]])).tolist() == [True, False]


class TestLocal:
    def test_halfplane(self):
        assert gd.local_convex_discrepancy(pts((0.25, 0.5)), gd.HalfPlane((1, 0), 0.5)) == 0.5

    def test_zero_disc(self):
        P = random_uniform(10, 2, 0)
        assert gd.local_convex_discrepancy(P, gd.TorusDisc((0.5, 0.5), 0.0)) == 0.0

    def test_square(self):
        P = random_uniform(10, 2, 0)
        sq = gd.ConvexPolygon(tuple(map(tuple, gd.UNIT_SQUARE)))
        assert gd.local_convex_discrepancy(P, sq) == pytest.approx(0.0, abs=1e-15)

    def test_needs_s2(self):
        with pytest.raises(ValueError):
            gd.local_convex_discrepancy(random_uniform(3, 3, 0), gd.HalfPlane((1, 0), 0.5))


class TestHalfplaneExact:
    def test_center_point(self):
        # any halfplane containing the center covers at least half the square
        assert gd.halfplane_disc_exact(pts((0.5, 0.5))).value == pytest.approx(0.5, abs=1e-12)

    def test_off_center_point(self):
        # the extremal line is bisected by the point, not axis-parallel
        assert gd.halfplane_disc_exact(pts((0.3, 0.62))).value == pytest.approx(0.772, abs=1e-12)

    def test_lattice(self):
        P = pts((.25, .25), (.25, .75), (.75, .25), (.75, .75))
        v = gd.halfplane_disc_exact(P).value
        assert 0.25 <= v <= 0.5

    def test_all_at_origin(self):
        assert gd.halfplane_disc_exact(pts((0, 0), (0, 0), (0, 0))).value == 1.0

    @pytest.mark.parametrize("N,seed", [(1, 0), (2, 1), (5, 2), (12, 3), (30, 4), (64, 5)])
    def test_vs_dense_sweep(self, N, seed):
        P = random_uniform(N, 2, seed)
        exact = gd.halfplane_disc_exact(P).value
        dense = gd.halfplane_disc_sweep(P, 8192)
        assert dense <= exact + 1e-12
        assert exact - dense <= 2e-3

    @pytest.mark.parametrize("N,seed", [(3, 7), (10, 8)])
    def test_vs_random_lines(self, N, seed):
        P = random_uniform(N, 2, seed)
        assert random_line_lower_bound(P.coords, 20_000, seed) <= gd.halfplane_disc_exact(P).value + 1e-12

    def test_budget(self):
        with pytest.raises(BudgetExceededError):
            gd.halfplane_disc_exact(random_uniform(11, 2, 0), max_points=10)

    def test_relabel(self):
        P = random_uniform(20, 2, 3)
        Q = UnitCubePoints(P.coords[::-1].copy())
        assert gd.halfplane_disc_exact(P).value == gd.halfplane_disc_exact(Q).value


class TestTorusDisc:
    def test_single_point(self):
        v = gd.torus_disc_disc(pts((0.5, 0.5)), 2, 8).value
        assert v == pytest.approx(1 - math.pi / 256, abs=1e-12)

    def test_empty_grids(self):
        P = random_uniform(5, 2, 0)
        assert gd.torus_disc_disc(P, 0, 8).value == 0.0
        assert gd.torus_disc_disc(P, 8, 0).value == 0.0

    def test_fibonacci_decreases(self):
        vals = [gd.torus_disc_disc(fibonacci_lattice(m), 32, 32).value for m in (7, 8, 9)]
        assert vals[0] > vals[1] > vals[2]

    def test_shift_invariance(self):
        P = random_uniform(25, 2, 4)
        base = gd.torus_disc_disc(P, 8, 10).value
        for k in ((1, 0), (3, 5), (7, 7)):
            Q = UnitCubePoints(np.mod(P.coords + np.array(k) / 8, 1.0))
            assert gd.torus_disc_disc(Q, 8, 10).value == pytest.approx(base, abs=1e-12)

    def test_lower_bound_of_fine_grid(self):
        P = random_uniform(15, 2, 1)
        assert gd.torus_disc_disc(P, 4, 4).value <= gd.torus_disc_disc(P, 8, 8).value + 1e-15


class TestHull:
    def test_hull_square(self):
        pts_ = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.5, 0]])
        H = gd.convex_hull(pts_)
        assert len(H) == 4 and gd.polygon_area(H) == pytest.approx(1.0)

    def test_center_point(self):
        assert gd.convex_hull_lowerbound(pts((0.5, 0.5)), 10).value >= 0.75

    def test_boxes_only(self):
        P = random_uniform(30, 2, 2)
        r = gd.convex_hull_lowerbound(P, 0, n_angles=0)
        assert r.value == star_disc_grid_exact(P).value

    def test_bounded(self):
        P = UnitCubePoints(np.zeros((4, 2)))
        assert gd.convex_hull_lowerbound(P, 50).value == 1.0

    def test_dominates_halfplane_sweep(self):
        P = random_uniform(20, 2, 9)
        assert gd.convex_hull_lowerbound(P, 20, n_angles=64).value >= gd.halfplane_disc_sweep(P, 64)


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 40), seed=st.integers(0, 10**6))
def test_convex_lower_bound_dominates_boxes(N, seed):
    P = random_uniform(N, 2, seed)
    r = gd.convex_hull_lowerbound(P, 20, seed=seed)
    assert star_disc_grid_exact(P).value - 1e-12 <= r.value <= 1.0
