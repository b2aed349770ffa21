import math

import numpy as np
import pytest

from rpekit.simplex import (
    ActionDistribution,
    TruncatedSimplex,
    beta_marginal_expectation,
    grid_size,
    project_truncated,
    simplex_grid,
    uniform_samples,
)


def brute_force_projection(x, floor, m=400):
    """Oracle: exhaustive search on a fine grid of the truncated simplex."""
    x = np.asarray(x, dtype=float)
    K = x.shape[0]
    grid = floor + (1.0 - K * floor) * simplex_grid(K, m)
    d2 = ((grid - x) ** 2).sum(axis=1)
    return grid[int(np.argmin(d2))]


class TestActionDistribution:
    def test_valid(self):
        d = ActionDistribution(np.array([0.2, 0.3, 0.5]))
        assert d.K == 3
        assert d[2] == 0.5

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            ActionDistribution(np.array([0.2, 0.3, 0.4]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ActionDistribution(np.array([1.2, -0.2]))

    def test_clamps_tiny_negative(self):
        d = ActionDistribution(np.array([1.0 + 5e-13, -5e-13]))
        assert d[1] == 0.0

    def test_immutable(self):
        d = ActionDistribution(np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            d.weights[0] = 1.0


class TestTruncatedSimplex:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            TruncatedSimplex(3, 0.4)

    def test_membership(self):
        ts = TruncatedSimplex(3, 0.1)
        assert ts.contains([0.8, 0.1, 0.1])
        assert not ts.contains([0.9, 0.05, 0.05])
        assert not ts.contains([0.5, 0.3, 0.3])


class TestProjectTruncated:
    def test_already_feasible(self):
        out = project_truncated((1 / 3, 1 / 3, 1 / 3), 0.0)
        assert np.allclose(out.weights, 1 / 3)

    def test_vertex_with_floor(self):
        # oracle first: brute-force minimization over a fine grid
        oracle = brute_force_projection((1.0, 0.0, 0.0), 0.1)
        out = project_truncated((1.0, 0.0, 0.0), 0.1)
        assert np.max(np.abs(out.weights - np.array([0.8, 0.1, 0.1]))) < 1e-12
        assert np.max(np.abs(out.weights - oracle)) < 1.0 / 400

    def test_shift_invariance(self):
        x = np.array([0.9, 0.6, -0.5])
        a = project_truncated(x, 0.0).weights
        b = project_truncated(x + 3.7, 0.0).weights
        assert np.max(np.abs(a - b)) < 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            x = rng.normal(size=4)
            floor = float(rng.uniform(0, 0.25))
            once = project_truncated(x, floor).weights
            twice = project_truncated(once, floor).weights
            assert np.max(np.abs(once - twice)) < 1e-10
            assert TruncatedSimplex(4, floor).contains(once)

    def test_optimality_against_grid(self):
        # ||proj(x) - x|| <= ||y - x|| for every feasible grid point y
        rng = np.random.default_rng(17)
        floor = 0.05
        ys = floor + (1.0 - 3 * floor) * simplex_grid(3, 40)
        idx = rng.choice(len(ys), size=1000)
        for _ in range(25):
            x = rng.normal(scale=2.0, size=3)
            p = project_truncated(x, floor).weights
            dp = float(np.linalg.norm(p - x))
            dy = np.linalg.norm(ys[idx] - x, axis=1)
            assert dp <= dy.min() + 1e-10

    def test_floor_out_of_range(self):
        with pytest.raises(ValueError):
            project_truncated((0.5, 0.5), -0.1)
        with pytest.raises(ValueError):
            project_truncated((0.5, 0.5), 0.6)


class TestUniformSamples:
    def test_mean_k3(self):
        s = uniform_samples(3, 10**6, seed=101)
        assert np.max(np.abs(s.mean(axis=0) - 1 / 3)) < 0.002

    def test_k2_marginal_uniform(self):
        # flat Dirichlet on the 2-simplex has a uniform first coordinate
        s = uniform_samples(2, 10**6, seed=7)[:, 0]
        s.sort()
        n = s.shape[0]
        ecdf_hi = np.arange(1, n + 1) / n
        ecdf_lo = np.arange(0, n) / n
        ks = max(np.max(np.abs(ecdf_hi - s)), np.max(np.abs(s - ecdf_lo)))
        assert ks < 0.005

    def test_deterministic(self):
        a = uniform_samples(4, 1000, seed=42)
        b = uniform_samples(4, 1000, seed=42)
        assert np.array_equal(a, b)

    def test_rows_on_simplex(self):
        s = uniform_samples(5, 300, seed=3)
        assert np.all(s >= 0)
        assert np.max(np.abs(s.sum(axis=1) - 1.0)) < 1e-12

    def test_mean_error_rate(self):
        # coordinate-mean error shrinks like N^(-1/2): factor 2 +- 30% per 4x
        errs = []
        for i, n in enumerate((4000, 16000, 64000)):
            trials = [np.abs(uniform_samples(3, n, seed=1000 + 97 * i + t).mean(axis=0) - 1 / 3).max()
                      for t in range(30)]
            errs.append(np.mean(trials))
        for a, b in zip(errs, errs[1:]):
            assert 1.4 <= a / b <= 2.6

    def test_preconditions(self):
        with pytest.raises(ValueError):
            uniform_samples(1, 10, 0)
        with pytest.raises(ValueError):
            uniform_samples(3, 0, 0)


class TestBetaMarginalExpectation:
    def test_identity_k1_k3(self):
        assert abs(beta_marginal_expectation(lambda x: x, 1, 3) - 1 / 3) < 1e-12

    def test_constant(self):
        for k, K in ((1, 2), (2, 5), (3, 4)):
            assert abs(beta_marginal_expectation(lambda x: 0.5 * np.ones_like(x), k, K) - 0.5) < 1e-12

    def test_max_threshold_analytic(self):
        # oracle: int_0^1 max(x, 1/2) * 2(1-x) dx = 3/8 + 1/6 = 13/24
        val = beta_marginal_expectation(lambda x: np.maximum(x, 0.5), 1, 3, breakpoints=(0.5,))
        assert abs(val - 13 / 24) < 1e-9

    def test_max_threshold_vs_monte_carlo(self):
        s = uniform_samples(3, 10**6, seed=55)[:, 0]
        mc = float(np.maximum(s, 0.5).mean())
        val = beta_marginal_expectation(lambda x: np.maximum(x, 0.5), 1, 3, breakpoints=(0.5,))
        assert abs(val - mc) < 1e-3

    def test_k_equals_K_rejected(self):
        with pytest.raises(ValueError):
            beta_marginal_expectation(lambda x: x, 3, 3)

    def test_sum_of_coordinates_is_beta(self):
        # validate the Beta(k, K-k) reduction against Monte Carlo before use
        rng_seed = 909
        for k, K in ((1, 3), (2, 3), (2, 5)):
            s = uniform_samples(K, 200_000, seed=rng_seed)[:, :k].sum(axis=1)
            for c, cuts in ((lambda x: x**2, ()), (lambda x: np.abs(x - 0.4), (0.4,))):
                mc = float(c(s).mean())
                mc_std = float(c(s).std())
                quad = beta_marginal_expectation(c, k, K, breakpoints=cuts)
                assert abs(quad - mc) < 3.0 * mc_std / math.sqrt(s.shape[0]) + 1e-9


class TestSimplexGrid:
    def test_k2_m2(self):
        pts = simplex_grid(2, 2)
        assert sorted(map(tuple, pts.tolist())) == [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]

    def test_k3_m2_count(self):
        assert len(simplex_grid(3, 2)) == 6

    def test_k3_m10_count_and_validity(self):
        pts = simplex_grid(3, 10)
        assert len(pts) == math.comb(12, 2) == 66 == grid_size(3, 10)
        for p in pts:
            ActionDistribution(p)
