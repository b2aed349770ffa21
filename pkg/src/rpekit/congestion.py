"""Single origin-destination atomless congestion networks.

A network is a directed graph with one scalar cost function per edge,
nonnegative, continuous, and nondecreasing on [0, 1] (validated on a
1000-point grid at load).  The action set is the set of simple paths from
origin to destination, so a path-flow is a simplex point; edge loads are the
sums of path flows crossing each edge and are always recomputed from the
path flow, never stored.

The perturbed edge cost at level eps blends the cost with its mean load
under the uniform distribution on the path-flow simplex:

    C_eps(x) = (1 - eps) C(x) + eps * E_uniform[C(load)],

where the load of an edge crossed by k of the K paths is Beta(k, K-k)
distributed (and identically 1 when k = K).  The integral is computed once
per (edge, eps) and cached; the cache fill is idempotent, so concurrent
readers are safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import payoff as px
from .game import GameFormatError, LargeGame, PayoffType
from .simplex import ActionDistribution, as_weights, beta_marginal_expectation, _leggauss, simplex_grid

PATH_CAP_DEFAULT = 10_000
MONOTONE_GRID = 1000


class NetworkModelError(ValueError):
    """Structurally invalid network (no route, bad costs, ...)."""


class PathLimitError(RuntimeError):
    """Path enumeration exceeded the configured cap."""


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    cost: px.Expr  # univariate in the edge load


class CongestionNetwork:
    """Directed network with per-edge costs and a cached path set."""

    def __init__(self, nodes: Sequence[str], edges: Sequence[Edge], origin: str,
                 destination: str, path_cap: int = PATH_CAP_DEFAULT):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        self.origin = origin
        self.destination = destination
        if origin == destination:
            raise NetworkModelError("origin and destination must differ")
        known = set(self.nodes)
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise NetworkModelError("edge ids must be unique")
        for e in self.edges:
            if e.tail not in known or e.head not in known:
                raise NetworkModelError(f"edge {e.id!r} references unknown nodes")
            _validate_cost(e)
        self._edge_index = {e.id: i for i, e in enumerate(self.edges)}
        self.paths: tuple[tuple[int, ...], ...] = tuple(
            tuple(self._edge_index[eid] for eid in p)
            for p in _enumerate_paths(self, path_cap)
        )
        self.path_names: tuple[str, ...] = tuple(
            "+".join(self.edges[i].id for i in p) for p in self.paths
        )
        # incidence[e, p] = 1 iff edge e lies on path p
        inc = np.zeros((len(self.edges), len(self.paths)))
        for pi, p in enumerate(self.paths):
            for ei in p:
                inc[ei, pi] = 1.0
        self.incidence = inc
        self.incidence.setflags(write=False)
        self._kinks: dict[int, tuple[float, ...]] = {}
        self._uniform_cost_cache: dict[tuple[int, float], float] = {}

    @property
    def n_paths(self) -> int:
        return len(self.paths)

    def edge_by_id(self, edge_id: str) -> int:
        try:
            return self._edge_index[edge_id]
        except KeyError:
            raise LookupError(f"unknown edge {edge_id!r}")

    def path_index(self, path) -> int:
        if isinstance(path, int):
            if not 0 <= path < self.n_paths:
                raise LookupError(f"path index {path} out of range")
            return path
        try:
            return self.path_names.index(path)
        except ValueError:
            raise LookupError(f"unknown path {path!r}; paths are {list(self.path_names)}")

    def edge_kinks(self, ei: int) -> tuple[float, ...]:
        if ei not in self._kinks:
            self._kinks[ei] = tuple(px.univariate_kinks(self.edges[ei].cost))
        return self._kinks[ei]

    def edge_cost_value(self, ei: int, x) -> np.ndarray:
        return px.eval_univariate(self.edges[ei].cost, x)

    def paths_through(self, ei: int) -> int:
        return int(self.incidence[ei].sum())

    def strictly_increasing(self, slope_tol: float = 1e-9) -> bool:
        """Grid-slope strict-increase detection for every edge cost."""
        xs = np.linspace(0.0, 1.0, MONOTONE_GRID + 1)
        h = xs[1] - xs[0]
        for ei in range(len(self.edges)):
            vals = self.edge_cost_value(ei, xs)
            if np.min(np.diff(vals) / h) < slope_tol:
                return False
        return True


def _validate_cost(e: Edge) -> None:
    groups = px.coord_groups(e.cost)
    if groups and groups != {frozenset({0})}:
        raise NetworkModelError(f"edge {e.id!r}: cost must depend on the load variable only")
    try:
        px.validate_continuity(e.cost, 1)
    except px.ExprError as exc:
        raise NetworkModelError(f"edge {e.id!r}: {exc}") from exc
    xs = np.linspace(0.0, 1.0, MONOTONE_GRID + 1)
    vals = px.eval_univariate(e.cost, xs)
    if np.min(vals) < -1e-12:
        raise NetworkModelError(f"edge {e.id!r}: cost is negative on [0, 1]")
    if np.min(np.diff(vals)) < -1e-9:
        raise NetworkModelError(f"edge {e.id!r}: cost is decreasing on [0, 1]")


def _enumerate_paths(net: CongestionNetwork, cap: int) -> list[tuple[str, ...]]:
    """All simple origin->destination paths as edge-id tuples, in
    lexicographic order of the id sequences (depth-first with sorted edges)."""
    out_edges: dict[str, list[Edge]] = {}
    for e in sorted(net.edges, key=lambda e: e.id):
        out_edges.setdefault(e.tail, []).append(e)
    found: list[tuple[str, ...]] = []

    def dfs(node: str, visited: set[str], trail: list[str]):
        if node == net.destination:
            found.append(tuple(trail))
            if len(found) > cap:
                raise PathLimitError(f"more than {cap} origin-destination paths")
            return
        for e in out_edges.get(node, ()):
            if e.head in visited:
                continue
            visited.add(e.head)
            trail.append(e.id)
            dfs(e.head, visited, trail)
            trail.pop()
            visited.remove(e.head)

    dfs(net.origin, {net.origin}, [])
    if not found:
        raise NetworkModelError(
            f"no path from {net.origin!r} to {net.destination!r}"
        )
    found.sort()
    return found


def enumerate_paths(network: CongestionNetwork) -> list[tuple[str, ...]]:
    """The cached ordered path set, as edge-id tuples."""
    return [tuple(network.edges[i].id for i in p) for p in network.paths]


@dataclass(frozen=True)
class Flow:
    """A path-flow: a simplex point over the network's path set.

    Edge loads are derived on access so they can never go stale.
    """

    network: CongestionNetwork
    dist: ActionDistribution

    def __post_init__(self):
        if self.dist.K != self.network.n_paths:
            raise ValueError(
                f"flow has {self.dist.K} coordinates for {self.network.n_paths} paths"
            )

    @property
    def edge_loads(self) -> np.ndarray:
        return self.network.incidence @ self.dist.weights

    def path_weight(self, path) -> float:
        return float(self.dist.weights[self.network.path_index(path)])


def make_flow(network: CongestionNetwork, weights) -> Flow:
    return Flow(network, ActionDistribution(as_weights(weights, network.n_paths)))


def edge_loads(network: CongestionNetwork, weights) -> np.ndarray:
    return network.incidence @ as_weights(weights, network.n_paths)


def path_cost(network: CongestionNetwork, path, flow: Flow) -> float:
    """Sum of edge costs along the path at the flow's edge loads."""
    pi = network.path_index(path)
    loads = flow.edge_loads
    return float(sum(
        network.edge_cost_value(ei, loads[ei])[0] for ei in network.paths[pi]
    ))


def path_costs(network: CongestionNetwork, weights, eps: float = 0.0) -> np.ndarray:
    """Vector of per-path (perturbed) costs at the given path flow."""
    loads = edge_loads(network, weights)
    per_edge = np.array([
        perturbed_edge_cost(network, ei, float(loads[ei]), eps)
        for ei in range(len(network.edges))
    ])
    return network.incidence.T @ per_edge


def uniform_mean_cost(network: CongestionNetwork, ei: int) -> float:
    """E[C_e(load)] under the uniform distribution on the path simplex."""
    key = (ei, 0.0)
    if key not in network._uniform_cost_cache:
        k = network.paths_through(ei)
        K = network.n_paths
        if k == 0:
            val = float(network.edge_cost_value(ei, 0.0)[0])
        elif k == K:
            val = float(network.edge_cost_value(ei, 1.0)[0])
        else:
            val = beta_marginal_expectation(
                lambda x: network.edge_cost_value(ei, x), k, K,
                breakpoints=network.edge_kinks(ei),
            )
        network._uniform_cost_cache[key] = val
    return network._uniform_cost_cache[key]


def perturbed_edge_cost(network: CongestionNetwork, edge, x: float, eps: float) -> float:
    """(1 - eps) * C_e(x) + eps * E_uniform[C_e(load)]."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    ei = network.edge_by_id(edge) if isinstance(edge, str) else int(edge)
    base = float(network.edge_cost_value(ei, x)[0])
    if eps == 0.0:
        return base
    return (1.0 - eps) * base + eps * uniform_mean_cost(network, ei)


def _edge_cost_integral(network: CongestionNetwork, ei: int, upper: float, nodes: int = 64) -> float:
    """Integral of C_e from 0 to upper, split at cost kinks (exact for
    polynomial pieces at this quadrature order)."""
    if upper <= 0.0:
        return 0.0
    cuts = [c for c in network.edge_kinks(ei) if 0.0 < c < upper]
    edges = [0.0] + cuts + [float(upper)]
    xs, ws = _leggauss(nodes)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid + half * xs
        total += half * float(np.sum(ws * network.edge_cost_value(ei, pts)))
    return total


def beckmann_objective(network: CongestionNetwork, flow: Flow, eps: float = 0.0) -> float:
    """Sum over edges of the integral of the perturbed edge cost from 0 to
    the edge load; convex in the path flow."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    loads = flow.edge_loads
    total = 0.0
    for ei in range(len(network.edges)):
        base = _edge_cost_integral(network, ei, float(loads[ei]))
        if eps == 0.0:
            total += base
        else:
            total += (1.0 - eps) * base + eps * uniform_mean_cost(network, ei) * float(loads[ei])
    return total


def social_cost(network: CongestionNetwork, flow: Flow) -> float:
    """Sum over edges of cost times load."""
    loads = flow.edge_loads
    return float(sum(
        float(network.edge_cost_value(ei, loads[ei])[0]) * loads[ei]
        for ei in range(len(network.edges))
    ))


def _social_cost_vec(network: CongestionNetwork, weights: np.ndarray) -> float:
    loads = network.incidence @ weights
    return float(sum(
        float(network.edge_cost_value(ei, loads[ei])[0]) * loads[ei]
        for ei in range(len(network.edges))
    ))


@dataclass(frozen=True)
class PoaReport:
    poa: float
    equilibrium_cost: float
    min_cost: float
    min_flow: tuple[float, ...]
    per_edge_convex: bool
    notes: tuple[str, ...]


def _minimize_social_cost(network: CongestionNetwork, starts: Sequence[np.ndarray],
                          iters: int = 4000, tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Projected gradient descent on the social cost (finite-difference
    gradient); returns the best value over the given starts."""
    from .solvers import _projected_descent  # local import to avoid a cycle

    best_val, best_x = np.inf, None
    for x0 in starts:
        x, val = _projected_descent(
            lambda w: _social_cost_vec(network, w),
            x0, floor=0.0, max_iters=iters, tol=tol,
        )
        if val < best_val:
            best_val, best_x = val, x
    return best_val, best_x


def price_of_anarchy(network: CongestionNetwork, schedule=None, seed: int = 0,
                     n_starts: int = 8) -> PoaReport:
    """Equilibrium social cost over minimum social cost.

    The equilibrium flow is the small-eps limit of the perturbed convex
    program; the minimum is found by projected gradient descent, run once
    from the uniform flow when x*C_e(x) is convex per edge (validated on a
    grid) and multi-start otherwise, with the best value reported.
    """
    from .solvers import BeckmannOptions, EpsSchedule, rpe_limit, solve_wardrop

    sched = schedule or EpsSchedule.harmonic(60)
    limit = rpe_limit(network, sched)
    # remove the O(eps) floor bias: the limit point is a Wardrop flow, so a
    # floor-0 solve warm-started at the last iterate lands on it exactly
    eq_flow = solve_wardrop(network, BeckmannOptions(start=tuple(limit.flow.dist.weights)))
    eq_cost = social_cost(network, eq_flow)

    xs = np.linspace(0.0, 1.0, 257)
    convex = True
    for ei in range(len(network.edges)):
        g = network.edge_cost_value(ei, xs) * xs
        mid = 0.5 * (g[:-2] + g[2:])
        if np.min(mid - g[1:-1]) < -1e-9:
            convex = False
            break

    P = network.n_paths
    starts = [np.full(P, 1.0 / P)]
    notes = []
    if convex:
        notes.append("per-edge x*C(x) convex on grid; single-start descent")
    else:
        rng = np.random.default_rng(seed)
        g = rng.standard_exponential((n_starts, P))
        starts += list(g / g.sum(axis=1, keepdims=True))
        notes.append("per-edge x*C(x) not convex; multi-start descent, best value reported")
    min_cost, min_x = _minimize_social_cost(network, starts)

    if min_cost <= 1e-12:
        poa = 1.0 if eq_cost <= 1e-12 else float("inf")
        notes.append("minimum social cost is zero")
    else:
        poa = eq_cost / min_cost
    return PoaReport(poa, eq_cost, min_cost, tuple(float(v) for v in min_x),
                     convex, tuple(notes))


def as_large_game(network: CongestionNetwork) -> LargeGame:
    """The induced large game: one payoff type of mass 1, actions = paths,
    payoff of a path = minus its cost, written over path-share sums."""
    exprs = []
    for p in network.paths:
        terms: list[px.Expr] = []
        for ei in p:
            share = tuple(pi for pi in range(network.n_paths) if network.incidence[ei, pi] > 0)
            cost = network.edges[ei].cost
            if px.coord_groups(cost):
                cost = px.remap_groups(cost, {frozenset({0}): share})
            terms.append(cost)
        total = terms[0]
        for t in terms[1:]:
            total = px.Add(total, t)
        exprs.append(px.negate(total))
    t = PayoffType("population", 1.0, tuple(exprs))
    return LargeGame(network.path_names, (t,))


# ---------------------------------------------------------------------------
# JSON format


def network_from_dict(data: Mapping, source: str = "<network>",
                      path_cap: int = PATH_CAP_DEFAULT) -> CongestionNetwork:
    try:
        nodes = list(data["nodes"])
        raw_edges = data["edges"]
        origin = data["origin"]
        destination = data["destination"]
    except (KeyError, TypeError) as exc:
        raise GameFormatError(f"{source}: missing field {exc}") from exc
    edges = []
    for i, ed in enumerate(raw_edges):
        where = f"{source}: edges[{i}]"
        try:
            eid, tail, head, cost_text = ed["id"], ed["from"], ed["to"], ed["cost"]
        except (KeyError, TypeError) as exc:
            raise GameFormatError(f"{where}: {exc}") from exc
        try:
            cost = px.parse_cost(cost_text)
        except px.ExprError as exc:
            raise GameFormatError(f"{where}: cost: {exc}") from exc
        edges.append(Edge(eid, tail, head, cost))
    try:
        return CongestionNetwork(nodes, edges, origin, destination, path_cap=path_cap)
    except NetworkModelError as exc:
        raise GameFormatError(f"{source}: {exc}") from exc


def load_network(path, path_cap: int = PATH_CAP_DEFAULT) -> CongestionNetwork:
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{p}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return network_from_dict(data, source=str(p), path_cap=path_cap)
