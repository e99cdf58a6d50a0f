import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodisc import pointset as ps


def f2_oracle(m, s):
    """Brute-force digital construction: x_j(n) = C_j * digits(n) over F2."""
    C = ps.sobol_generator_matrices(s, m).astype(int)
    N = 1 << m
    out = np.zeros((N, s))
    for n in range(N):
        digits = np.array([(n >> k) & 1 for k in range(m)])
        for j in range(s):
            y = C[j] @ digits % 2
            out[n, j] = sum(int(y[r]) * 2.0 ** -(r + 1) for r in range(m))
    return out


class TestUnitCubePoints:
    def test_rejects_one(self):
        with pytest.raises(ValueError):
            ps.UnitCubePoints(np.array([[1.0]]))

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            ps.UnitCubePoints(np.array([[np.nan, 0.2]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ps.UnitCubePoints(np.zeros((0, 2)))

    def test_shape_accessors(self):
        P = ps.UnitCubePoints(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert P.n_points == 2 and P.s == 2 and len(P) == 2
        np.testing.assert_array_equal(P.column(1), [0.2, 0.4])


class TestVanDerCorput:
    def test_base2(self):
        np.testing.assert_array_equal(ps.van_der_corput(8).coords[:, 0],
                                      [0, .5, .25, .75, .125, .625, .375, .875])

    def test_base3(self):
        np.testing.assert_allclose(ps.van_der_corput(4, 3).coords[:, 0], [0, 1 / 3, 2 / 3, 1 / 9])

    def test_bad_base(self):
        with pytest.raises(ValueError):
            ps.van_der_corput(4, 1)


class TestHalton:
    def test_two_points(self):
        np.testing.assert_allclose(ps.halton(2, 2).coords, [[0, 0], [0.5, 1 / 3]])

    def test_single_point(self):
        np.testing.assert_array_equal(ps.halton(1, 3).coords, [[0, 0, 0]])

    def test_s1_is_vdc(self):
        np.testing.assert_array_equal(ps.halton(4, 1).coords, ps.van_der_corput(4).coords)

    def test_dimension_limit(self):
        with pytest.raises(ValueError):
            ps.halton(4, 17)

    def test_hammersley_first_axis(self):
        H = ps.hammersley(8, 3)
        np.testing.assert_array_equal(H.coords[:, 0], np.arange(8) / 8)
        np.testing.assert_array_equal(H.coords[:, 1], ps.van_der_corput(8).coords[:, 0])


class TestSobol:
    def test_m2_s2(self):
        np.testing.assert_array_equal(ps.sobol_net(2, 2).coords,
                                      [[0, 0], [.5, .5], [.25, .75], [.75, .25]])

    def test_m0(self):
        np.testing.assert_array_equal(ps.sobol_net(0, 2).coords, [[0, 0]])

    def test_s1_is_vdc(self):
        for m in range(0, 11):
            np.testing.assert_array_equal(ps.sobol_net(m, 1).coords,
                                          ps.van_der_corput(1 << m).coords)

    @pytest.mark.parametrize("m,s", [(1, 10), (4, 3), (6, 5), (7, 10)])
    def test_matches_f2_oracle(self, m, s):
        np.testing.assert_array_equal(ps.sobol_net(m, s).coords, f2_oracle(m, s))

    @pytest.mark.parametrize("m", range(1, 9))
    def test_two_dim_is_zero_net(self, m):
        # every elementary interval of area 2^-m holds exactly one point
        X = (ps.sobol_net(m, 2).coords * (1 << m)).astype(int)
        for a in range(m + 1):
            cells = (X[:, 0] >> (m - a)) * (1 << (m - a)) + (X[:, 1] >> a)
            assert np.all(np.bincount(cells, minlength=1 << m) == 1)

    def test_stratified_each_dimension(self):
        X = ps.sobol_net(6, 10).coords
        for j in range(10):
            assert sorted(X[:, j]) == list(np.arange(64) / 64)

    @pytest.mark.parametrize("m,s", [(-1, 2), (21, 2), (3, 0), (3, 11)])
    def test_range_errors(self, m, s):
        with pytest.raises(ValueError):
            ps.sobol_net(m, s)


class TestFibonacci:
    def test_five(self):
        np.testing.assert_allclose(ps.fibonacci_lattice(5).coords,
                                   [[0, 0], [.2, .6], [.4, .2], [.6, .8], [.8, .4]])

    def test_two(self):
        np.testing.assert_array_equal(ps.fibonacci_lattice(3).coords, [[0, 0], [.5, .5]])

    def test_eight_point_three(self):
        assert tuple(ps.fibonacci_lattice(6).coords[3]) == (3 / 8, 7 / 8)

    def test_index_error(self):
        with pytest.raises(ValueError):
            ps.fibonacci_lattice(1)


class TestStratified:
    def test_single_cell(self):
        assert ps.stratified(0, 2, 5).n_points == 1

    def test_k1_s1(self):
        x = np.sort(ps.stratified(1, 1, 3).coords[:, 0])
        assert x[0] < 0.5 <= x[1] < 1

    @pytest.mark.parametrize("k,s", [(2, 2), (3, 2), (2, 3), (4, 1), (1, 5)])
    def test_one_per_cell(self, k, s):
        X = ps.stratified(k, s, 11).coords
        cells = np.floor(X * (1 << k)).astype(int)
        flat = np.ravel_multi_index(cells.T, (1 << k,) * s)
        assert np.all(np.bincount(flat, minlength=1 << (k * s)) == 1)

    def test_overflow(self):
        with pytest.raises(ValueError):
            ps.stratified(5, 5, 0)

    def test_deterministic(self):
        np.testing.assert_array_equal(ps.stratified(2, 2, 9).coords, ps.stratified(2, 2, 9).coords)


class TestRandom:
    def test_deterministic(self):
        np.testing.assert_array_equal(ps.random_uniform(50, 3, 1).coords,
                                      ps.random_uniform(50, 3, 1).coords)

    def test_seeds_differ(self):
        assert not np.array_equal(ps.random_uniform(50, 3, 1).coords,
                                  ps.random_uniform(50, 3, 2).coords)

    def test_mean(self):
        assert 0.49 <= ps.random_uniform(10_000, 1, 2024).coords.mean() <= 0.51

    def test_bad_seed(self):
        with pytest.raises(ValueError):
            ps.make_rng(-1)

    def test_bad_count(self):
        with pytest.raises(ValueError):
            ps.random_uniform(0, 1, 0)


class TestGenerateAndCsv:
    def test_generator_spec(self):
        spec = ps.GeneratorSpec("sobol_net", {"m": 3, "s": 2})
        np.testing.assert_array_equal(spec.build().coords, ps.sobol_net(3, 2).coords)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ps.generate("lattice_xyz", N=3)

    def test_missing_param(self):
        with pytest.raises(ValueError, match="'seed'"):
            ps.generate("random", N=3, s=1)

    def test_roundtrip(self, tmp_path):
        P = ps.random_uniform(40, 3, 8)
        path = tmp_path / "p.csv"
        ps.write_points_csv(P, path)
        assert path.read_text().splitlines()[0] == "dim0,dim1,dim2"
        np.testing.assert_array_equal(ps.read_points_csv(path).coords, P.coords)


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(["halton", "hammersley", "random"]),
       N=st.integers(1, 300), s=st.integers(1, 8), seed=st.integers(0, 2**32))
def test_coordinates_in_half_open_cube(kind, N, s, seed):
    P = ps.generate(kind, N=N, s=s, seed=seed)
    assert np.all((P.coords >= 0) & (P.coords < 1)) and P.coords.shape == (N, s)
