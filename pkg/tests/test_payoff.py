import numpy as np
import pytest

from rpekit import payoff as px
from rpekit.simplex import uniform_samples

ACTIONS = ["a", "b", "c"]


def ev(expr, *pts):
    return expr(np.array(pts, dtype=float))


class TestParser:
    def test_arithmetic(self):
        e = px.parse_payoff("2 * tau(a) - 0.5 + tau(b) * tau(b)", ACTIONS)
        v = ev(e, [0.2, 0.3, 0.5])
        assert abs(v[0] - (0.4 - 0.5 + 0.09)) < 1e-15

    def test_unary_minus_and_parens(self):
        e = px.parse_payoff("-(tau(a) - 1) * 2", ACTIONS)
        assert abs(ev(e, [0.25, 0.5, 0.25])[0] - 1.5) < 1e-15

    def test_min_max(self):
        e = px.parse_payoff("max(tau(b), 0.5) - min(tau(a), tau(c))", ACTIONS)
        assert abs(ev(e, [0.1, 0.7, 0.2])[0] - (0.7 - 0.1)) < 1e-15

    def test_piecewise(self):
        e = px.parse_payoff(
            "piecewise(tau(b); 0.2: -1, 0.3: 10*tau(b) - 3, 0.8: 0, 1: 5*tau(b) - 4)", ACTIONS)
        xs = [0.0, 0.1, 0.2, 0.25, 0.3, 0.5, 0.8, 0.9, 1.0]
        expect = [-1, -1, -1, -0.5, 0, 0, 0, 0.5, 1]
        got = e(np.array([[1 - x, x, 0.0] if x <= 1 else None for x in xs], dtype=float))
        assert np.max(np.abs(got - np.array(expect))) < 1e-12

    def test_cost_variable(self):
        e = px.parse_cost("x + 0.25")
        assert abs(px.eval_univariate(e, 0.5)[0] - 0.75) < 1e-15

    def test_unknown_action(self):
        with pytest.raises(px.ExprError):
            px.parse_payoff("tau(z)", ACTIONS)

    def test_trailing_garbage(self):
        with pytest.raises(px.ExprError):
            px.parse_payoff("tau(a) tau(b)", ACTIONS)

    def test_x_not_allowed_in_payoffs(self):
        with pytest.raises(px.ExprError):
            px.parse_payoff("x + 1", ACTIONS)


class TestPiecewiseValidation:
    def test_bounds_increasing(self):
        with pytest.raises(px.ExprError):
            px.parse_payoff("piecewise(tau(a); 0.5: 1, 0.3: 2, 1: 0)", ACTIONS)

    def test_last_bound_must_reach_one(self):
        with pytest.raises(px.ExprError):
            px.parse_payoff("piecewise(tau(a); 0.5: 1, 0.9: 2)", ACTIONS)

    def test_continuity_ok(self):
        e = px.parse_payoff("piecewise(tau(a); 0.5: tau(a), 1: 0.5)", ACTIONS)
        px.validate_continuity(e, 3)

    def test_discontinuity_detected(self):
        e = px.parse_payoff("piecewise(tau(a); 0.5: 0, 1: 1)", ACTIONS)
        with pytest.raises(px.ExprError):
            px.validate_continuity(e, 3)


class TestStructure:
    def test_groups(self):
        e = px.parse_payoff("tau(a) + max(tau(c), 0.2)", ACTIONS)
        assert px.coord_groups(e) == {frozenset({0}), frozenset({2})}

    def test_remap(self):
        e = px.parse_cost("x + 1")
        r = px.remap_groups(e, {frozenset({0}): (1, 2)})
        assert abs(r(np.array([[0.2, 0.3, 0.5]]))[0] - 1.8) < 1e-15

    def test_kinks_from_max(self):
        e = px.parse_cost("max(x, 0.5)")
        kinks = px.univariate_kinks(e)
        assert len(kinks) == 1 and abs(kinks[0] - 0.5) < 1e-9

    def test_kinks_crossing_lines(self):
        e = px.parse_cost("min(2*x, x + 0.25)")
        kinks = px.univariate_kinks(e)
        assert any(abs(k - 0.25) < 1e-9 for k in kinks)


class TestUniformExpectation:
    def test_linear(self):
        e = px.parse_payoff("tau(a) + 2*tau(b) - 1", ACTIONS)
        assert abs(px.uniform_expectation(e, 3) - (1 / 3 + 2 / 3 - 1)) < 1e-12

    def test_univariate_nonlinear(self):
        e = px.parse_payoff("max(tau(b), 0.5)", ACTIONS)
        assert abs(px.uniform_expectation(e, 3) - 13 / 24) < 1e-9

    def test_abc_piecewise(self):
        # oracle: analytic integral against Beta(1,2) is -127/300
        e = px.parse_payoff(
            "piecewise(tau(b); 0.2: -1, 0.3: 10*tau(b) - 3, 0.8: 0, 1: 5*tau(b) - 4)", ACTIONS)
        got = px.uniform_expectation(e, 3)
        assert abs(got - (-127 / 300)) < 1e-9
        s = uniform_samples(3, 400_000, seed=8)
        assert abs(got - float(e(s).mean())) < 2e-3

    def test_product_of_coordinates_not_reducible(self):
        e = px.parse_payoff("tau(a) * tau(b)", ACTIONS)
        assert px.uniform_expectation(e, 3) is None

    def test_same_group_product_reduces(self):
        e = px.parse_payoff("tau(a) * tau(a)", ACTIONS)
        # E[x^2] under Beta(1,2): 1/6 + (1/3)^2 = Var + mean^2 = 1/18 + 1/9
        assert abs(px.uniform_expectation(e, 3) - (1 / 18 + 1 / 9)) < 1e-9

    def test_coordinate_sum_group(self):
        e = px.CoordSum((0, 1))
        assert abs(px.uniform_expectation(e, 3) - 2 / 3) < 1e-12

    def test_full_mass_group(self):
        e = px.Max(px.CoordSum((0, 1, 2)), px.Const(0.2))
        assert abs(px.uniform_expectation(e, 3) - 1.0) < 1e-12

    def test_vectorized_eval_matches_scalar(self):
        e = px.parse_payoff("max(tau(b), 0.5) - tau(c)*0.25", ACTIONS)
        pts = uniform_samples(3, 50, seed=2)
        batch = e(pts)
        single = np.array([e(p[None, :])[0] for p in pts])
        assert np.max(np.abs(batch - single)) < 1e-15
