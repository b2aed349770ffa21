import numpy as np
import pytest

from rpekit import congestion as cg
from rpekit import fixtures
from rpekit import payoff as px
from rpekit.congestion import (
    Flow,
    as_large_game,
    beckmann_objective,
    edge_loads,
    enumerate_paths,
    make_flow,
    path_cost,
    path_costs,
    perturbed_edge_cost,
    price_of_anarchy,
    social_cost,
)
from rpekit.game import RandomizedProfile, eval_payoff
from rpekit.simplex import ActionDistribution, simplex_grid, uniform_samples

THREE = fixtures.load_network_fixture("three_path")
PIGOU = fixtures.load_network_fixture("pigou")
MODPIG = fixtures.load_network_fixture("modified_pigou")
BRAESS = fixtures.load_network_fixture("braess")


class TestValidation:
    def test_decreasing_cost_rejected(self):
        with pytest.raises(cg.NetworkModelError):
            cg.CongestionNetwork(
                ("o", "t"), (cg.Edge("e", "o", "t", px.parse_cost("1 - x")),), "o", "t")

    def test_negative_cost_rejected(self):
        with pytest.raises(cg.NetworkModelError):
            cg.CongestionNetwork(
                ("o", "t"), (cg.Edge("e", "o", "t", px.parse_cost("x - 0.5")),), "o", "t")

    def test_no_route_rejected(self):
        with pytest.raises(cg.NetworkModelError):
            cg.CongestionNetwork(
                ("o", "m", "t"), (cg.Edge("e", "o", "m", px.parse_cost("x")),), "o", "t")

    def test_path_cap(self):
        with pytest.raises(cg.PathLimitError):
            cg.CongestionNetwork(
                ("o", "t"),
                tuple(cg.Edge(f"e{i}", "o", "t", px.parse_cost("x")) for i in range(4)),
                "o", "t", path_cap=3)


class TestPaths:
    def test_modified_pigou_two_paths(self):
        assert len(MODPIG.paths) == 2

    def test_three_path_three(self):
        assert enumerate_paths(THREE) == [("a",), ("b",), ("c",)]

    def test_braess_three_paths_lex(self):
        # hand enumeration of the 4-node topology with the crossing link
        assert enumerate_paths(BRAESS) == [("ov", "vt"), ("ov", "vw", "wt"), ("ow", "wt")]


class TestCosts:
    def test_path_cost_c(self):
        f = make_flow(THREE, [5 / 6, 0, 1 / 6])
        assert abs(path_cost(THREE, "c", f) - 0.5) < 1e-15

    def test_zero_load_zero_cost(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("x")), cg.Edge("q", "o", "t", px.parse_cost("x"))),
            "o", "t")
        f = make_flow(net, [1.0, 0.0])
        assert path_cost(net, "q", f) == 0.0

    def test_braess_crossing_full_load(self):
        f = make_flow(BRAESS, [0.0, 1.0, 0.0])
        assert abs(path_cost(BRAESS, "ov+vw+wt", f) - 2.0) < 1e-15

    def test_edge_load_linearity(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            t1, t2 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
            a = float(rng.uniform())
            mix = edge_loads(BRAESS, a * t1 + (1 - a) * t2)
            parts = a * edge_loads(BRAESS, t1) + (1 - a) * edge_loads(BRAESS, t2)
            assert np.max(np.abs(mix - parts)) < 1e-14


class TestPerturbedCost:
    def test_constant_edge_unchanged(self):
        for x in (0.0, 0.4, 1.0):
            for eps in (0.01, 0.2):
                assert abs(perturbed_edge_cost(THREE, "a", x, eps) - 0.5) < 1e-12

    def test_c_closed_form(self):
        for eps in (0.05, 1 / 60):
            for x in (0.0, 0.3, 0.9):
                expect = (1 - eps) * x + (1 + eps) / 3
                assert abs(perturbed_edge_cost(THREE, "c", x, eps) - expect) < 1e-12

    def test_eps_zero_is_identity(self):
        for x in (0.1, 0.6):
            assert perturbed_edge_cost(THREE, "b", x, 0.0) == max(x, 0.5)

    def test_uniform_convergence_linear_in_eps(self):
        xs = np.linspace(0, 1, 100)
        for ei, name in enumerate(("a", "b", "c")):
            base = np.array([perturbed_edge_cost(THREE, name, x, 0.0) for x in xs])
            for eps in (0.1, 0.01, 0.001):
                pert = np.array([perturbed_edge_cost(THREE, name, x, eps) for x in xs])
                assert np.max(np.abs(pert - base)) <= eps * 1.0 + 1e-12

    def test_nondecreasing_in_x(self):
        xs = np.linspace(0, 1, 200)
        vals = [perturbed_edge_cost(THREE, "b", x, 0.1) for x in xs]
        assert min(np.diff(vals)) >= -1e-12


class TestBeckmannObjective:
    def test_paper_reduced_form(self):
        # with tau(b) pinned at eps the objective equals the two-variable
        # closed form plus the b-path integral term
        for eps in (1 / 12, 1 / 60):
            bterm = eps * ((1 - eps) * 0.5 + eps * 13 / 24)
            for tc in (0.1, 1 / 6, 0.3):
                ta = 1.0 - eps - tc
                f = make_flow(THREE, [ta, eps, tc])
                expect = ((1 - eps) / 2 * tc**2 - (1 - 2 * eps) / 6 * tc
                          + (1 - eps) / 2 + bterm)
                assert abs(beckmann_objective(THREE, f, eps) - expect) < 1e-12

    def test_zero_costs(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("0")), cg.Edge("q", "o", "t", px.parse_cost("0"))),
            "o", "t")
        for w in ([1, 0], [0.5, 0.5]):
            assert beckmann_objective(net, make_flow(net, w), 0.2) == 0.0

    def test_single_edge_full_load(self):
        net = cg.CongestionNetwork(
            ("o", "t"), (cg.Edge("p", "o", "t", px.parse_cost("x * x")),), "o", "t")
        f = make_flow(net, [1.0])
        assert abs(beckmann_objective(net, f, 0.0) - 1 / 3) < 1e-12

    def test_midpoint_convexity(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            t1, t2 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
            mid = 0.5 * (t1 + t2)
            fm = beckmann_objective(THREE, make_flow(THREE, mid), 0.05)
            f1 = beckmann_objective(THREE, make_flow(THREE, t1), 0.05)
            f2 = beckmann_objective(THREE, make_flow(THREE, t2), 0.05)
            assert fm <= 0.5 * (f1 + f2) + 1e-9


class TestSocialCost:
    def test_three_path_equilibrium(self):
        assert abs(social_cost(THREE, make_flow(THREE, [5 / 6, 0, 1 / 6])) - 0.5) < 1e-12

    def test_pigou_all_lower(self):
        f = make_flow(PIGOU, [1.0, 0.0])  # paths ordered (lower, upper)
        assert social_cost(PIGOU, f) == 1.0

    def test_zero_flow_zero_cost(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("x")), cg.Edge("q", "o", "t", px.parse_cost("2*x"))),
            "o", "t")
        assert social_cost(net, make_flow(net, [0.0, 1.0])) == 2.0

    def test_edge_sum_equals_path_sum(self):
        rng = np.random.default_rng(9)
        for net in (THREE, BRAESS):
            for _ in range(50):
                w = rng.dirichlet(np.ones(net.n_paths))
                f = make_flow(net, w)
                via_paths = float(sum(
                    w[i] * path_cost(net, i, f) for i in range(net.n_paths)))
                assert abs(social_cost(net, f) - via_paths) < 1e-12


class TestPriceOfAnarchy:
    def test_pigou(self):
        # oracle: grid search at 1/1000 puts the optimum at half-half, cost 3/4
        grid = simplex_grid(2, 1000)
        sc = [social_cost(PIGOU, Flow(PIGOU, ActionDistribution(g))) for g in grid]
        assert abs(min(sc) - 0.75) < 1e-9
        rep = price_of_anarchy(PIGOU)
        assert abs(rep.poa - 4 / 3) < 1e-3

    def test_constant_costs(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("0.7")), cg.Edge("q", "o", "t", px.parse_cost("0.7"))),
            "o", "t")
        assert abs(price_of_anarchy(net).poa - 1.0) < 1e-9

    def test_three_path(self):
        # the grid oracle at 1/1000 shows the interior optimum beats 1/2
        grid = simplex_grid(3, 200)
        sc = min(social_cost(THREE, Flow(THREE, ActionDistribution(g))) for g in grid)
        assert sc < 0.5
        rep = price_of_anarchy(THREE)
        assert abs(rep.min_cost - 71 / 144) < 1e-6
        assert abs(rep.poa - 72 / 71) < 1e-3


class TestAsLargeGame:
    def test_three_path_matches_game_fixture(self):
        game = as_large_game(THREE)
        ref = fixtures.load_game_fixture("three_path")
        rng = np.random.default_rng(4)
        for _ in range(60):
            tau = rng.dirichlet(np.ones(3))
            for a in ("a", "b", "c"):
                assert abs(eval_payoff(game, "population", a, tau)
                           - eval_payoff(ref, "driver", a, tau)) < 1e-12

    def test_constant_tie_game(self):
        net = cg.CongestionNetwork(
            ("o", "t"),
            (cg.Edge("p", "o", "t", px.parse_cost("0.3")), cg.Edge("q", "o", "t", px.parse_cost("0.3"))),
            "o", "t")
        game = as_large_game(net)
        rng = np.random.default_rng(11)
        for _ in range(20):
            tau = rng.dirichlet(np.ones(2))
            vals = [eval_payoff(game, "population", a, tau) for a in game.actions]
            assert abs(vals[0] - vals[1]) < 1e-15

    def test_braess_round_trip(self):
        game = as_large_game(BRAESS)
        rng = np.random.default_rng(21)
        for _ in range(100):
            w = rng.dirichlet(np.ones(3))
            f = make_flow(BRAESS, w)
            for i, name in enumerate(BRAESS.path_names):
                assert abs(-eval_payoff(game, "population", name, w)
                           - path_cost(BRAESS, i, f)) < 1e-12

    def test_grid_round_trip_exact(self):
        game = as_large_game(THREE)
        for w in simplex_grid(3, 8):
            f = make_flow(THREE, w)
            for i, name in enumerate(THREE.path_names):
                assert abs(-eval_payoff(game, "population", name, w)
                           - path_cost(THREE, i, f)) < 1e-12
