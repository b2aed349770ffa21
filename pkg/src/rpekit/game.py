"""Large games with finitely many payoff types.

A game with a continuum of anonymous players is represented by a finite list
of payoff types with masses: each type carries one payoff expression per
action, evaluated at (own action, population action distribution).  Profiles
assign one mixed action per type; the societal summary is the mass-weighted
average of those mixtures.

Perturbed summaries are finite mixtures

    (1-eps) * dirac(tau)  +  sum_j w_j * dirac(v_j)  +  w_u * uniform,

and expected payoffs under them combine exact point evaluations with the
uniform-part integral, computed in closed form where the expression structure
allows and by seeded Monte Carlo otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import payoff as px
from .simplex import SUM_TOL, ActionDistribution, as_weights, uniform_samples

MC_DEFAULT_SAMPLES = 200_000
MC_DEFAULT_SEED = 20_240_517

_MC_SAMPLE_CACHE: dict[tuple[int, int, int], np.ndarray] = {}


class GameFormatError(ValueError):
    """Malformed game, network, or profile description."""


@dataclass(frozen=True)
class PayoffType:
    id: str
    mass: float
    payoffs: tuple[px.Expr, ...]  # one expression per action, in action order


class LargeGame:
    """Finite-type model of a game with a continuum of players.

    Masses must be positive and sum to 1 within 1e-12; type ids unique.
    Payoff expressions are validated for piecewise continuity at load time.
    Instances are immutable after construction and safe to share across
    threads (the only cache is an idempotent per-payoff integral memo).
    """

    def __init__(self, actions: Sequence[str], types: Sequence[PayoffType]):
        self.actions: tuple[str, ...] = tuple(actions)
        self.types: tuple[PayoffType, ...] = tuple(types)
        if len(set(self.actions)) != len(self.actions) or not self.actions:
            raise GameFormatError("actions must be nonempty and unique")
        if not self.types:
            raise GameFormatError("at least one payoff type is required")
        ids = [t.id for t in self.types]
        if len(set(ids)) != len(ids):
            raise GameFormatError("type ids must be unique")
        masses = np.array([t.mass for t in self.types], dtype=float)
        if np.any(masses <= 0.0):
            raise GameFormatError("type masses must be strictly positive")
        if abs(float(masses.sum()) - 1.0) > SUM_TOL:
            raise GameFormatError(f"type masses sum to {masses.sum()!r}, not 1")
        K = self.K
        for t in self.types:
            if len(t.payoffs) != K:
                raise GameFormatError(f"type {t.id!r} needs one payoff per action")
            for a, e in zip(self.actions, t.payoffs):
                try:
                    px.validate_continuity(e, K)
                except px.ExprError as exc:
                    raise GameFormatError(f"payoff of type {t.id!r}, action {a!r}: {exc}") from exc
        self._action_index = {a: k for k, a in enumerate(self.actions)}
        self._type_index = {t.id: i for i, t in enumerate(self.types)}
        self._uniform_means: dict[tuple[int, int], float | None] = {}

    @property
    def K(self) -> int:
        return len(self.actions)

    def action_index(self, action: str) -> int:
        try:
            return self._action_index[action]
        except KeyError:
            raise LookupError(f"unknown action {action!r}; actions are {list(self.actions)}")

    def type_by_id(self, type_id: str) -> PayoffType:
        try:
            return self.types[self._type_index[type_id]]
        except KeyError:
            raise LookupError(f"unknown type {type_id!r}; types are {[t.id for t in self.types]}")

    def payoff_expr(self, type_id: str, action: str) -> px.Expr:
        return self.type_by_id(type_id).payoffs[self.action_index(action)]

    def uniform_payoff_mean(self, type_id: str, action_k: int) -> float | None:
        """Closed-form E_eta[u(a, .)] when the expression reduces, memoized."""
        key = (self._type_index[type_id], action_k)
        if key not in self._uniform_means:
            expr = self.types[key[0]].payoffs[action_k]
            self._uniform_means[key] = px.uniform_expectation(expr, self.K)
        return self._uniform_means[key]


# ---------------------------------------------------------------------------
# Profiles


class RandomizedProfile:
    """Map from payoff type to a mixed action (a simplex point)."""

    def __init__(self, dists: Mapping[str, ActionDistribution]):
        self.dists: dict[str, ActionDistribution] = dict(dists)
        if not self.dists:
            raise GameFormatError("profile must cover at least one type")

    @classmethod
    def symmetric(cls, game: LargeGame, dist) -> "RandomizedProfile":
        d = dist if isinstance(dist, ActionDistribution) else ActionDistribution(as_weights(dist, game.K))
        return cls({t.id: d for t in game.types})

    @classmethod
    def pure(cls, game: LargeGame, assignment: Mapping[str, str]) -> "RandomizedProfile":
        out = {}
        for t in game.types:
            w = np.zeros(game.K)
            w[game.action_index(assignment[t.id])] = 1.0
            out[t.id] = ActionDistribution(w)
        return cls(out)

    def for_type(self, type_id: str) -> ActionDistribution:
        try:
            return self.dists[type_id]
        except KeyError:
            raise LookupError(f"profile does not cover type {type_id!r}")

    def min_weight(self) -> float:
        return min(float(d.weights.min()) for d in self.dists.values())

    @property
    def full_support(self) -> bool:
        return self.min_weight() > 0.0

    def items(self):
        return self.dists.items()


def societal_summary(game: LargeGame, profile: RandomizedProfile) -> ActionDistribution:
    """Mass-weighted average action distribution of all types."""
    total = np.zeros(game.K)
    for t in game.types:
        total += t.mass * profile.for_type(t.id).weights
    return ActionDistribution(total)


# ---------------------------------------------------------------------------
# Perturbation measures


@dataclass(frozen=True)
class PerturbationMeasure:
    """Finite mixture (base Dirac) + (atom Diracs) + (uniform component).

    ``epsilon`` is the nominal perturbation level; the base weight must be at
    least 1 - epsilon (measures that put exactly 1 - epsilon on the base are
    the common case, and checkers note when the weight is strictly larger).
    Full support on the simplex holds iff the uniform component is positive.
    """

    base: ActionDistribution
    base_weight: float
    atoms: tuple[tuple[ActionDistribution, float], ...]
    uniform_weight: float
    epsilon: float

    def __post_init__(self):
        weights = [self.base_weight, self.uniform_weight] + [w for _, w in self.atoms]
        if min(weights) < -SUM_TOL:
            raise ValueError("mixture weights must be nonnegative")
        if abs(sum(weights) - 1.0) > SUM_TOL:
            raise ValueError(f"mixture weights sum to {sum(weights)!r}, not 1")
        if not 0.0 <= self.epsilon < 1.0 + SUM_TOL:
            raise ValueError("epsilon must lie in [0, 1)")
        if self.base_weight < 1.0 - self.epsilon - SUM_TOL:
            raise ValueError(
                f"base weight {self.base_weight} below 1 - epsilon = {1.0 - self.epsilon}"
            )
        ks = {self.base.K} | {v.K for v, _ in self.atoms}
        if len(ks) != 1:
            raise ValueError("all mixture components must share one dimension")

    @property
    def K(self) -> int:
        return self.base.K

    @property
    def full_support(self) -> bool:
        return self.uniform_weight > 0.0

    @classmethod
    def dirac(cls, tau) -> "PerturbationMeasure":
        base = tau if isinstance(tau, ActionDistribution) else ActionDistribution(as_weights(tau))
        return cls(base, 1.0, (), 0.0, 0.0)

    @classmethod
    def mix(cls, tau, epsilon: float, vertex_weights: Mapping[int, float] | None = None,
            uniform_share: float = 1.0, atoms: Sequence[tuple] = ()) -> "PerturbationMeasure":
        """(1-eps) dirac(tau) + eps * [vertex and point atoms + uniform].

        ``vertex_weights`` and ``uniform_share`` are shares of the epsilon
        mass; extra ``atoms`` are (point, share) pairs.  Shares must sum to 1.
        """
        base = tau if isinstance(tau, ActionDistribution) else ActionDistribution(as_weights(tau))
        K = base.K
        shares = float(uniform_share)
        atom_list: list[tuple[ActionDistribution, float]] = []
        if vertex_weights:
            for k, share in vertex_weights.items():
                v = np.zeros(K)
                v[k] = 1.0
                atom_list.append((ActionDistribution(v), epsilon * share))
                shares += share
        for point, share in atoms:
            pt = point if isinstance(point, ActionDistribution) else ActionDistribution(as_weights(point, K))
            atom_list.append((pt, epsilon * share))
            shares += share
        if abs(shares - 1.0) > 1e-9:
            raise ValueError(f"epsilon-mass shares sum to {shares}, not 1")
        return cls(base, 1.0 - epsilon, tuple(atom_list), epsilon * uniform_share, epsilon)


PerturbationTemplate = Callable[[ActionDistribution], PerturbationMeasure]


def uniform_template(epsilon: float) -> PerturbationTemplate:
    """tau -> (1-eps) dirac(tau) + eps * uniform."""
    return lambda tau: PerturbationMeasure.mix(tau, epsilon)


def vertex_uniform_template(epsilon: float, vertex_weights: Mapping[int, float],
                            uniform_share: float) -> PerturbationTemplate:
    return lambda tau: PerturbationMeasure.mix(tau, epsilon, vertex_weights, uniform_share)


def own_action_template(epsilon: float, action_k: int) -> PerturbationTemplate:
    """tau -> (1-eps) dirac(tau) + (eps - eps^2) dirac(vertex) + eps^2 uniform."""
    return lambda tau: PerturbationMeasure.mix(
        tau, epsilon, vertex_weights={action_k: 1.0 - epsilon}, uniform_share=epsilon
    )


def random_perturbation(K: int, seed: int, n_atoms: int = 2,
                        min_uniform: float = 0.05) -> PerturbationMeasure:
    """A random full-support perturbation measure (for robustness probes)."""
    rng = np.random.default_rng(seed)
    pts = uniform_samples(K, n_atoms + 1, int(rng.integers(2**31)))
    raw = rng.dirichlet(np.ones(n_atoms + 2))
    uniform_w = min_uniform + (1.0 - min_uniform) * raw[-1]
    rest = raw[:-1] / raw[:-1].sum() * (1.0 - uniform_w)
    base = ActionDistribution(pts[0])
    atoms = tuple((ActionDistribution(pts[1 + j]), float(rest[1 + j])) for j in range(n_atoms))
    eps = 1.0 - float(rest[0])
    return PerturbationMeasure(base, float(rest[0]), atoms, float(uniform_w), eps)


# ---------------------------------------------------------------------------
# Payoff evaluation


@dataclass(frozen=True)
class MonteCarloConfig:
    """Settings for the uniform-part integral of expected payoffs.

    method 'auto' uses the closed form when the expression reduces and falls
    back to Monte Carlo; 'mc' forces sampling; 'exact' raises if no closed
    form exists.
    """

    samples: int = MC_DEFAULT_SAMPLES
    seed: int = MC_DEFAULT_SEED
    method: str = "auto"

    def as_dict(self) -> dict:
        return {"samples": self.samples, "seed": self.seed, "method": self.method}


MC_DEFAULT = MonteCarloConfig()


def _mc_matrix(K: int, mc: MonteCarloConfig) -> np.ndarray:
    key = (K, mc.samples, mc.seed)
    if key not in _MC_SAMPLE_CACHE:
        if len(_MC_SAMPLE_CACHE) > 8:
            _MC_SAMPLE_CACHE.clear()
        _MC_SAMPLE_CACHE[key] = uniform_samples(K, mc.samples, mc.seed)
    return _MC_SAMPLE_CACHE[key]


def eval_payoff(game: LargeGame, type_id: str, action: str, tau) -> float:
    """u(type, action, tau) by deterministic expression evaluation."""
    w = as_weights(tau, game.K)
    expr = game.payoff_expr(type_id, action)
    return float(expr(w[None, :])[0])


def _uniform_part(game: LargeGame, type_id: str, action_k: int, mc: MonteCarloConfig) -> float:
    if game.K == 1:
        return float(game.types[game._type_index[type_id]].payoffs[0](np.ones((1, 1)))[0])
    if mc.method in ("auto", "exact"):
        exact = game.uniform_payoff_mean(type_id, action_k)
        if exact is not None:
            return exact
        if mc.method == "exact":
            raise ValueError("no closed form for this payoff's uniform integral")
    pts = _mc_matrix(game.K, mc)
    expr = game.type_by_id(type_id).payoffs[action_k]
    return float(np.mean(expr(pts)))


def expected_payoff(game: LargeGame, type_id: str, action: str,
                    measure: PerturbationMeasure, mc: MonteCarloConfig = MC_DEFAULT) -> float:
    """Expected payoff of an action under a perturbed societal summary."""
    k = game.action_index(action)
    expr = game.payoff_expr(type_id, action)
    total = measure.base_weight * float(expr(measure.base.weights[None, :])[0])
    for point, w in measure.atoms:
        if w != 0.0:
            total += w * float(expr(point.weights[None, :])[0])
    if measure.uniform_weight != 0.0:
        total += measure.uniform_weight * _uniform_part(game, type_id, k, mc)
    return total


def expected_payoff_vector(game: LargeGame, type_id: str, measure: PerturbationMeasure,
                           mc: MonteCarloConfig = MC_DEFAULT) -> np.ndarray:
    return np.array([
        expected_payoff(game, type_id, a, measure, mc) for a in game.actions
    ])


def best_responses(game: LargeGame, type_id: str, measure: PerturbationMeasure,
                   tol: float = 1e-6, mc: MonteCarloConfig = MC_DEFAULT) -> set[str]:
    """Actions whose expected payoff is within tol of the best."""
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    vals = expected_payoff_vector(game, type_id, measure, mc)
    top = float(vals.max())
    return {a for a, v in zip(game.actions, vals) if top - v <= tol}


# ---------------------------------------------------------------------------
# JSON formats


def game_from_dict(data: Mapping, source: str = "<game>") -> LargeGame:
    try:
        actions = list(data["actions"])
        raw_types = data["types"]
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"{source}: missing field {exc}") from exc
    types = []
    for i, td in enumerate(raw_types):
        where = f"{source}: types[{i}]"
        try:
            tid, mass, pay = td["id"], float(td["mass"]), td["payoff"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GameFormatError(f"{where}: {exc}") from exc
        exprs = []
        for a in actions:
            if a not in pay:
                raise GameFormatError(f"{where}: payoff missing for action {a!r}")
            try:
                exprs.append(px.parse_payoff(pay[a], actions))
            except px.ExprError as exc:
                raise GameFormatError(f"{where}: action {a!r}: {exc}") from exc
        types.append(PayoffType(tid, mass, tuple(exprs)))
    return LargeGame(actions, types)


def load_game(path) -> LargeGame:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return game_from_dict(data, source=str(p))


def profile_from_dict(data: Mapping, game: LargeGame, source: str = "<profile>") -> RandomizedProfile:
    try:
        raw = data["profiles"]
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"{source}: missing field 'profiles'") from exc
    out = {}
    for t in game.types:
        if t.id not in raw:
            raise GameFormatError(f"{source}: no profile for type {t.id!r}")
        try:
            out[t.id] = ActionDistribution(as_weights(raw[t.id], game.K))
        except ValueError as exc:
            raise GameFormatError(f"{source}: type {t.id!r}: {exc}") from exc
    return RandomizedProfile(out)


def load_profile(path, game: LargeGame) -> RandomizedProfile:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return profile_from_dict(data, game, source=str(p))
