"""Bundled example games and networks, plus programmatic variants."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .. import payoff as px
from ..congestion import CongestionNetwork, Edge, load_network
from ..game import LargeGame, PayoffType, load_game

GAMES = ("three_path", "modified_pigou", "attack", "abc_counterexample")
NETWORKS = ("three_path", "modified_pigou", "pigou", "braess")


def game_path(name: str) -> Path:
    p = resources.files(__package__) / "games" / f"{name}.json"
    return Path(str(p))


def network_path(name: str) -> Path:
    p = resources.files(__package__) / "networks" / f"{name}.json"
    return Path(str(p))


def load_game_fixture(name: str) -> LargeGame:
    return load_game(game_path(name))


def load_network_fixture(name: str) -> CongestionNetwork:
    return load_network(network_path(name))


def attack_game(theta1: float = 0.8, theta2: float = 0.4) -> LargeGame:
    """Three-action attack coordination game; requires 1 > theta1 > theta2 > 0.

    The default parameter values are fixture choices, not modeled data.
    """
    if not 1.0 > theta1 > theta2 > 0.0:
        raise ValueError("need 1 > theta1 > theta2 > 0")
    actions = ["a", "b", "c"]
    payoffs = {
        "a": f"{theta1!r} * (tau(a) - 0.5)",
        "b": f"{theta2!r} * (tau(b) - 0.5)",
        "c": "0",
    }
    t = PayoffType("agent", 1.0, tuple(px.parse_payoff(payoffs[a], actions) for a in actions))
    return LargeGame(actions, (t,))


def three_path_strict_network() -> CongestionNetwork:
    """Three-path network with every constant cost segment replaced by
    0.5 + x/100, so all edge costs are strictly increasing."""
    edges = (
        Edge("a", "o", "t", px.parse_cost("0.5 + 0.01*x")),
        Edge("b", "o", "t", px.parse_cost("max(x, 0.5 + 0.01*x)")),
        Edge("c", "o", "t", px.parse_cost("x + 0.3333333333333333")),
    )
    return CongestionNetwork(("o", "t"), edges, "o", "t")
