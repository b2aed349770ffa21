import numpy as np
import pytest

from rpekit import congestion as cg
from rpekit import fixtures
from rpekit import game as gm
from rpekit import payoff as px
from rpekit import solvers as sv
from rpekit.congestion import make_flow, path_costs
from rpekit.simplex import ActionDistribution

THREE = fixtures.load_network_fixture("three_path")
MODPIG = fixtures.load_network_fixture("modified_pigou")
PIGOU = fixtures.load_network_fixture("pigou")
BRAESS = fixtures.load_network_fixture("braess")
ALL_NETS = (THREE, MODPIG, PIGOU, BRAESS)


def closed_form(eps):
    return np.array([(5 - 10 * eps + 6 * eps**2) / (6 - 6 * eps), eps,
                     (1 - 2 * eps) / (6 - 6 * eps)])


class TestEpsSchedule:
    def test_harmonic(self):
        s = sv.EpsSchedule.harmonic(3)
        assert np.allclose(s.values, [1 / 6, 1 / 12, 1 / 18])

    def test_monotone_required(self):
        with pytest.raises(ValueError):
            sv.EpsSchedule((0.1, 0.1))
        with pytest.raises(ValueError):
            sv.EpsSchedule((0.1, -0.05))

    def test_floor_check(self):
        with pytest.raises(ValueError):
            sv.EpsSchedule((0.4, 0.2)).check_floor(3)


class TestSolveBeckmann:
    def test_three_path_closed_form(self):
        for eps in (1 / 12, 1 / 60, 1 / 600):
            flow = sv.solve_beckmann(THREE, eps)
            assert np.max(np.abs(flow.dist.weights - closed_form(eps))) < 1e-6

    def test_symmetric_identical_edges(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("x")), cg.Edge("q", "o", "t", px.parse_cost("x"))),
            "o", "t")
        for eps in (0.05, 0.2):
            flow = sv.solve_beckmann(net, eps)
            assert np.max(np.abs(flow.dist.weights - 0.5)) < 1e-8

    def test_pigou_vs_grid_oracle(self):
        eps = 0.01
        flow = sv.solve_beckmann(PIGOU, eps)

        def sweep(lo, hi, step):
            ts = np.arange(lo, hi + step / 2, step)
            vals = [cg.beckmann_objective(PIGOU, make_flow(PIGOU, [t, 1 - t]), eps)
                    for t in ts]
            return float(ts[int(np.argmin(vals))])

        # brute force at resolution 1e-5, zoomed in two stages (the 1-D
        # objective is convex, so narrowing around the coarse argmin is exact)
        coarse = sweep(eps, 1 - eps, 1e-3)
        best_t = sweep(max(eps, coarse - 2e-3), min(1 - eps, coarse + 2e-3), 1e-5)
        assert abs(flow.dist[0] - best_t) < 1e-4

    def test_eps_range_rejected(self):
        with pytest.raises(ValueError):
            sv.solve_beckmann(THREE, 0.0)
        with pytest.raises(ValueError):
            sv.solve_beckmann(THREE, 0.4)

    def test_objective_monotone_along_iterates(self):
        flow, trace = sv._beckmann_descent(
            THREE, 1 / 60, 1 / 60, sv.BeckmannOptions(record_trace=True))
        diffs = np.diff(np.array(trace))
        assert np.all(diffs <= 1e-14)

    def test_deterministic(self):
        a = sv.solve_beckmann(THREE, 1 / 60).dist.weights
        b = sv.solve_beckmann(THREE, 1 / 60).dist.weights
        assert np.array_equal(a, b)


class TestVerifyKkt:
    def test_solver_output_passes(self):
        for net in ALL_NETS:
            for eps in (1 / 12, 1 / 60):
                flow = sv.solve_beckmann(net, eps)
                rep = sv.verify_kkt(net, eps, flow, tol=1e-6)
                assert rep.passed, (net.path_names, eps, rep)

    def test_kkt_at_ten_times_solver_tol(self):
        opts = sv.BeckmannOptions(tol=1e-9)
        for net in ALL_NETS:
            flow = sv.solve_beckmann(net, 1 / 60, opts)
            assert sv.verify_kkt(net, 1 / 60, flow, tol=1e-8).passed

    def test_uniform_flow_fails(self):
        eps = 1 / 60
        f = make_flow(THREE, [1 / 3, 1 / 3, 1 / 3])
        rep = sv.verify_kkt(THREE, eps, f, tol=1e-6)
        assert rep.verdict == "fail"

    def test_symmetric_interior_passes_mu_zero(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("x")), cg.Edge("q", "o", "t", px.parse_cost("x"))),
            "o", "t")
        rep = sv.verify_kkt(net, 0.1, make_flow(net, [0.5, 0.5]), tol=1e-9)
        assert rep.passed
        assert max(abs(m) for m in rep.mu) < 1e-9

    def test_all_floored_malformed(self):
        f = make_flow(MODPIG, [0.5, 0.5])
        rep = sv.verify_kkt(MODPIG, 0.49999, f, tol=1e-3)
        assert rep.verdict == "malformed"

    def test_perturbed_solution_flips(self):
        from rpekit.simplex import project_truncated
        for net in ALL_NETS:
            for eps in (1 / 12, 1 / 60):
                flow = sv.solve_beckmann(net, eps)
                w = flow.dist.weights.copy()
                w[int(np.argmax(w))] -= 0.05
                moved = cg.Flow(net, project_truncated(w, eps))
                assert sv.verify_kkt(net, eps, moved, tol=1e-6).verdict == "fail"


class TestRpeLimit:
    def test_three_path_limit(self):
        res = sv.rpe_limit(THREE, sv.EpsSchedule.harmonic(200))
        assert np.max(np.abs(res.flow.dist.weights - np.array([5 / 6, 0, 1 / 6]))) < 1e-3
        assert res.converged

    def test_modified_pigou_limit(self):
        res = sv.rpe_limit(MODPIG, sv.EpsSchedule.harmonic(200))
        assert np.max(np.abs(res.flow.dist.weights - np.array([1.0, 0.0]))) < 1e-3

    def test_single_path_network(self):
        net = cg.CongestionNetwork(
            ("o", "t"), (cg.Edge("p", "o", "t", px.parse_cost("x")),), "o", "t")
        res = sv.rpe_limit(net, sv.EpsSchedule((0.5, 0.25, 0.125)))
        assert res.flow.dist.tolist() == [1.0]

    def test_extrapolated_limit_is_exact(self):
        res = sv.rpe_limit(THREE, sv.EpsSchedule.harmonic(60))
        assert np.max(np.abs(res.extrapolated.dist.weights
                             - np.array([5 / 6, 0, 1 / 6]))) < 1e-6

    def test_limit_satisfies_wardrop_conditions(self):
        for net in (THREE, MODPIG, PIGOU, BRAESS):
            res = sv.rpe_limit(net, sv.EpsSchedule.harmonic(80))
            w = res.extrapolated.dist.weights
            costs = path_costs(net, w, 0.0)
            used = w > 1e-4
            assert float(costs[used].max() - costs.min()) < 1e-3

    def test_trajectory_csv_shape(self):
        res = sv.rpe_limit(THREE, sv.EpsSchedule.harmonic(5))
        text = sv.trajectory_csv(res.trajectory)
        lines = text.strip().split("\n")
        assert lines[0] == "n,epsilon,coord_1,coord_2,coord_3,objective,kkt_residual"
        assert len(lines) == 6


class TestStrictIncreaseUniqueness:
    def test_ten_random_starts_agree(self):
        net = fixtures.three_path_strict_network()
        sols = []
        for s in range(10):
            rng = np.random.default_rng(s)
            g0 = rng.standard_exponential(3)
            sols.append(sv.solve_beckmann(
                net, 1 / 60, sv.BeckmannOptions(start=tuple(g0 / g0.sum()))).dist.weights)
        sols = np.array(sols)
        assert np.max(np.abs(sols[:, None, :] - sols[None, :, :])) < 1e-6

    def test_limit_cauchy(self):
        net = fixtures.three_path_strict_network()
        res = sv.rpe_limit(net, sv.EpsSchedule.harmonic(100))
        assert res.strictly_increasing
        assert res.cauchy_residuals[-1] < 1e-4

    def test_non_strict_detected(self):
        assert not THREE.strictly_increasing()
        assert fixtures.three_path_strict_network().strictly_increasing()


class TestFixedPoint:
    def test_three_path_near_beckmann(self):
        eps = 1 / 60
        game = fixtures.load_game_fixture("three_path")
        res = sv.fixed_point_eps_rpe(game, eps)
        assert res.converged
        assert np.max(np.abs(res.summary.weights - closed_form(eps))) < 5e-2
        h = res.profile.for_type("driver")
        assert h[1] <= eps + 1e-12

    def test_output_is_full_support_floor(self):
        game = fixtures.load_game_fixture("three_path")
        eps = 1 / 30
        res = sv.fixed_point_eps_rpe(game, eps)
        assert res.profile.min_weight() >= eps / game.K - 1e-12

    def test_output_reverifies(self):
        from rpekit.checkers import check_eps_rpe
        game = fixtures.load_game_fixture("three_path")
        eps = 1 / 60
        res = sv.fixed_point_eps_rpe(game, eps)
        rep = check_eps_rpe(game, res.profile, eps, gm.uniform_template(eps), tol=1e-6)
        assert rep.passed

    def test_single_action_game(self):
        g1 = gm.LargeGame(["only"], (gm.PayoffType("t", 1.0, (px.Const(2.0),)),))
        res = sv.fixed_point_eps_rpe(g1, 0.25)
        assert res.summary.tolist() == [1.0]

    def test_abc_boundary(self):
        game = fixtures.load_game_fixture("abc_counterexample")
        for eps in (1 / 10, 1 / 20, 1 / 40):
            res = sv.fixed_point_eps_rpe(game, eps)
            assert float(res.summary.weights.min()) <= 3 * eps
            assert np.max(np.abs(res.summary.weights - 1 / 3)) > 0.05

    def test_requires_full_support_template(self):
        game = fixtures.load_game_fixture("three_path")
        with pytest.raises(ValueError):
            sv.fixed_point_eps_rpe(game, 0.1, lambda tau: gm.PerturbationMeasure.dirac(tau))


class TestRpeLimitGame:
    def test_three_path_converges(self):
        game = fixtures.load_game_fixture("three_path")
        res = sv.rpe_limit_game(game, sv.EpsSchedule.harmonic(30))
        assert res.converged
        assert np.max(np.abs(np.array(res.summaries[-1]) - np.array([5 / 6, 0, 1 / 6]))) < 5e-3
        lim = res.extrapolated_profile.for_type("driver")
        assert np.max(np.abs(lim.weights - np.array([5 / 6, 0, 1 / 6]))) < 1e-3

    def test_dominant_action_dirac(self):
        acts = ["good", "bad"]
        t = gm.PayoffType("t", 1.0, (px.parse_payoff("1", acts), px.parse_payoff("0", acts)))
        game = gm.LargeGame(acts, (t,))
        res = sv.rpe_limit_game(game, sv.EpsSchedule.harmonic(10))
        assert res.converged
        lim = res.extrapolated_profile.for_type("t")
        assert np.max(np.abs(lim.weights - np.array([1.0, 0.0]))) < 1e-9

    def test_abc_never_center(self):
        game = fixtures.load_game_fixture("abc_counterexample")
        res = sv.rpe_limit_game(game, sv.EpsSchedule.harmonic(12))
        final = np.array(res.summaries[-1])
        assert (not res.converged) or float(final.min()) <= 3 * (1 / 72)
        assert np.max(np.abs(final - 1 / 3)) > 0.05
