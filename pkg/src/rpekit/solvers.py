"""Equilibrium solvers.

Two routes to an equilibrium refinement that survives trembling of the
societal summary:

* congestion networks: minimize the perturbed Beckmann objective over the
  simplex truncated at a per-path floor eps (projected gradient with
  backtracking), then drive eps to zero along a schedule;
* general large games: damped iteration of the smoothed best-response map
  tau -> sum_t mass_t * [(1-eps) br_t(perturbed tau) + eps * barycenter],
  stopped on the distance between tau and the attainable set of the
  best-response correspondence (a small linear program), again followed to
  the eps -> 0 limit.

Both report full trajectories so callers can judge convergence themselves.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from . import congestion as cg
from . import game as gm
from .simplex import ActionDistribution, as_weights, project_truncated


class SolverDiverged(RuntimeError):
    """Iteration failed to reach tolerance; carries the best iterate."""

    def __init__(self, message: str, best=None, residual: float | None = None,
                 history: Sequence[float] = ()):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.history = list(history)


@dataclass(frozen=True)
class EpsSchedule:
    """Strictly decreasing positive perturbation levels."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("schedule must be nonempty")
        if min(self.values) <= 0.0:
            raise ValueError("schedule values must be positive")
        if any(b >= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("schedule must be strictly decreasing")

    @classmethod
    def harmonic(cls, n_max: int, scale: float = 6.0) -> "EpsSchedule":
        """eps_n = 1 / (scale * n) for n = 1..n_max."""
        return cls(tuple(1.0 / (scale * n) for n in range(1, n_max + 1)))

    def check_floor(self, n_actions: int) -> None:
        if self.values[0] >= 1.0 / n_actions:
            raise ValueError(
                f"eps_1 = {self.values[0]} not below 1/{n_actions}; truncated simplex too small"
            )


# ---------------------------------------------------------------------------
# Projected gradient machinery


def _pg_residual(x: np.ndarray, grad: np.ndarray, floor: float) -> float:
    stepped = project_truncated(x - grad, floor).weights
    return float(np.max(np.abs(stepped - x)))


def _projected_descent(fun: Callable[[np.ndarray], float], x0: np.ndarray, floor: float,
                       max_iters: int = 4000, tol: float = 1e-10,
                       fd_step: float = 1e-7) -> tuple[np.ndarray, float]:
    """Monotone projected descent with central finite-difference gradients.

    Utility minimizer for small smooth-ish problems (social cost); the
    Beckmann solver below uses analytic gradients instead.
    """
    x = project_truncated(x0, floor).weights.copy()
    f = fun(x)
    K = x.shape[0]
    step = 1.0
    for _ in range(max_iters):
        g = np.empty(K)
        for k in range(K):
            e = np.zeros(K)
            e[k] = fd_step
            g[k] = (fun(x + e) - fun(x - e)) / (2.0 * fd_step)
        if _pg_residual(x, g, floor) <= tol:
            break
        improved = False
        t = step
        for _ in range(40):
            cand = project_truncated(x - t * g, floor).weights
            fc = fun(cand)
            if fc <= f - 1e-4 * float(g @ (x - cand)) and fc <= f:
                x, f = cand, fc
                step = min(t * 1.8, 1e3)
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return x, f


@dataclass(frozen=True)
class BeckmannOptions:
    tol: float = 1e-10          # projected-gradient residual, sup norm
    max_iters: int = 50_000
    armijo: float = 1e-4
    start: tuple[float, ...] | None = None
    record_trace: bool = False


@dataclass(frozen=True)
class TrajectoryPoint:
    n: int
    epsilon: float
    weights: tuple[float, ...]
    objective: float
    kkt_residual: float


def _beckmann_descent(network: cg.CongestionNetwork, eps: float, floor: float,
                      opts: BeckmannOptions) -> tuple[cg.Flow, list[float]]:
    """Projected gradient with backtracking on the (perturbed) Beckmann
    objective; the gradient component of a path is its perturbed cost."""
    P = network.n_paths
    if opts.start is not None:
        x = project_truncated(as_weights(opts.start, P), floor).weights
    else:
        x = project_truncated(np.full(P, 1.0 / P), floor).weights

    def objective(w: np.ndarray) -> float:
        return cg.beckmann_objective(network, cg.Flow(network, ActionDistribution(w)), eps)

    def gradient(w: np.ndarray) -> np.ndarray:
        return cg.path_costs(network, w, eps)

    f = objective(x)
    g = gradient(x)
    step = 1.0
    jump = 64.0  # multiplier for the long-step probe
    trace = [f] if opts.record_trace else []
    prev_x, prev_g = None, None
    best_res, best_it = np.inf, 0
    for it in range(opts.max_iters):
        res = _pg_residual(x, g, floor)
        if res <= opts.tol:
            return cg.Flow(network, ActionDistribution(x)), trace
        if res < 0.99 * best_res:
            best_res, best_it = res, it
        elif it - best_it > 150:
            # residual progress stalled below the objective's fp resolution
            x, res = _residual_polish(gradient, x, floor, max(step, 1.0), opts.tol)
            if res <= 10.0 * opts.tol:
                return cg.Flow(network, ActionDistribution(x)), trace
            raise SolverDiverged(
                f"residual stalled at {res:.3e}",
                best=cg.Flow(network, ActionDistribution(x)), residual=res, history=trace,
            )
        bb = 0.0
        if prev_x is not None:
            s = x - prev_x
            y = g - prev_g
            sy = float(s @ y)
            if sy > 1e-16:
                bb = float(s @ s) / sy  # Barzilai-Borwein estimate
        t = float(np.clip(bb if bb > 0.0 else step, 1e-8, 1e6))
        # long-step probe: tiny cost gaps between near-tied paths make the
        # BB-scaled flow drain mass extremely slowly; one strictly-improving
        # jump per iteration covers that regime in logarithmically many steps
        t_jump = float(min(t * jump, 1e6))
        cand_j = project_truncated(x - t_jump * g, floor).weights
        if float(np.max(np.abs(cand_j - x))) > 0.0:
            fj = objective(cand_j)
            if fj < f - 1e-12:
                prev_x, prev_g = x, g
                x, f = cand_j, fj
                g = gradient(x)
                if opts.record_trace:
                    trace.append(f)
                jump = min(jump * 4.0, 1e6)
                continue
            jump = max(jump / 4.0, 64.0)
        accepted = False
        for _ in range(80):
            cand = project_truncated(x - t * g, floor).weights
            d = cand - x
            if float(np.max(np.abs(d))) == 0.0:
                break
            fc = objective(cand)
            if fc <= f + opts.armijo * float(g @ d):
                prev_x, prev_g = x, g
                x, f = cand, fc
                g = gradient(x)
                if opts.record_trace:
                    trace.append(f)
                accepted = True
                step = t
                break
            t *= 0.5
        if not accepted:
            # objective comparisons are fp-noise-limited near the optimum;
            # finish with fixed-step gradient iterations monitored on the
            # residual alone
            x, res = _residual_polish(gradient, x, floor, max(step, 1.0), opts.tol)
            if res <= 10.0 * opts.tol:
                return cg.Flow(network, ActionDistribution(x)), trace
            raise SolverDiverged(
                f"line search stalled at residual {res:.3e}",
                best=cg.Flow(network, ActionDistribution(x)), residual=res, history=trace,
            )
    res = _pg_residual(x, gradient(x), floor)
    raise SolverDiverged(
        f"no convergence in {opts.max_iters} iterations (residual {res:.3e})",
        best=cg.Flow(network, ActionDistribution(x)), residual=res, history=trace,
    )


def _residual_polish(gradient: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                     floor: float, t: float, tol: float,
                     max_iters: int = 600) -> tuple[np.ndarray, float]:
    res = _pg_residual(x, gradient(x), floor)
    for _ in range(max_iters):
        if res <= tol or t < 1e-12:
            break
        cand = project_truncated(x - t * gradient(x), floor).weights
        cand_res = _pg_residual(cand, gradient(cand), floor)
        if cand_res < res:
            x, res = cand, cand_res
            t *= 1.3
        else:
            t *= 0.5
    return x, res


def solve_beckmann(network: cg.CongestionNetwork, eps: float,
                   opts: BeckmannOptions = BeckmannOptions()) -> cg.Flow:
    """Minimize the perturbed Beckmann objective over the eps-truncated
    simplex (floor eps per path).  Deterministic from its start (uniform
    flow by default)."""
    P = network.n_paths
    if not 0.0 < eps < 1.0 / P:
        raise ValueError(f"eps must lie in (0, 1/{P}) for this network")
    flow, _ = _beckmann_descent(network, eps, floor=eps, opts=opts)
    return flow


def solve_wardrop(network: cg.CongestionNetwork,
                  opts: BeckmannOptions = BeckmannOptions()) -> cg.Flow:
    """Unperturbed Beckmann minimum over the full simplex (floor 0)."""
    flow, _ = _beckmann_descent(network, eps=0.0, floor=0.0, opts=opts)
    return flow


# ---------------------------------------------------------------------------
# KKT verification


@dataclass(frozen=True)
class KktReport:
    """Stationarity and complementary-slackness check for a truncated-simplex
    Beckmann minimum: every interior path must attain the minimal perturbed
    cost, floored paths may be more expensive (their multiplier is the
    excess)."""

    lam: float
    mu: tuple[float, ...]
    interior: tuple[bool, ...]
    stationarity_residual: float
    comp_slack_residual: float
    min_mu: float
    verdict: str  # pass | fail | malformed
    tol: float

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def verify_kkt(network: cg.CongestionNetwork, eps: float, flow: cg.Flow,
               tol: float = 1e-6) -> KktReport:
    w = flow.dist.weights
    costs = cg.path_costs(network, w, eps)
    interior = w > eps + tol
    if not np.any(interior):
        # all paths at the floor would force sum(tau) = P*eps < 1
        return KktReport(float("nan"), tuple(costs - costs.min()), tuple(bool(b) for b in interior),
                         float("inf"), float("inf"), 0.0, "malformed", tol)
    lam = -float(np.min(costs[interior]))
    mu = costs + lam
    stationarity = float(np.max(np.abs(mu[interior])))
    comp_slack = float(np.max(np.abs(mu * (w - eps))))
    min_mu = float(np.min(mu))
    ok = stationarity <= tol and min_mu >= -tol
    return KktReport(lam, tuple(float(v) for v in mu), tuple(bool(b) for b in interior),
                     stationarity, comp_slack, min_mu, "pass" if ok else "fail", tol)


# ---------------------------------------------------------------------------
# eps -> 0 limit for networks


def _extrapolate_to_zero(eps_values: Sequence[float], vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Polynomial (Richardson) extrapolation of iterates to eps = 0, using up
    to three well-spaced schedule points so noise is not amplified."""
    eps_values = list(eps_values)
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    last = len(eps_values) - 1
    picks = [last]
    for target in (2.0, 4.0):
        for i in range(last, -1, -1):
            if eps_values[i] >= target * eps_values[last]:
                if i not in picks:
                    picks.append(i)
                break
    picks = sorted(set(picks))
    if len(picks) == 1:
        return vectors[last]
    es = np.array([eps_values[i] for i in picks])
    out = np.zeros_like(vectors[0])
    for j, i in enumerate(picks):
        w = 1.0
        for k in range(len(picks)):
            if k != j:
                w *= (0.0 - es[k]) / (es[j] - es[k])
        out += w * vectors[i]
    return out


@dataclass(frozen=True)
class RpeLimitResult:
    flow: cg.Flow
    extrapolated: cg.Flow
    trajectory: tuple[TrajectoryPoint, ...]
    cauchy_residuals: tuple[float, ...]
    converged: bool
    strictly_increasing: bool
    notes: tuple[str, ...]


def rpe_limit(network: cg.CongestionNetwork, schedule: EpsSchedule,
              opts: BeckmannOptions = BeckmannOptions(), limit_tol: float = 1e-3,
              warm_start: bool = True, kkt_tol: float = 1e-6) -> RpeLimitResult:
    """Solve the perturbed program along the schedule and report the final
    iterate, the eps -> 0 extrapolation, and the full trajectory with
    sup-norm Cauchy residuals."""
    schedule.check_floor(network.n_paths)
    traj: list[TrajectoryPoint] = []
    residuals: list[float] = []
    iterates: list[np.ndarray] = []
    prev = None
    cur_opts = opts
    for n, eps in enumerate(schedule.values, start=1):
        if warm_start and prev is not None:
            cur_opts = replace(opts, start=tuple(prev))
        flow = solve_beckmann(network, eps, cur_opts)
        w = flow.dist.weights
        obj = cg.beckmann_objective(network, flow, eps)
        kkt = verify_kkt(network, eps, flow, tol=kkt_tol)
        traj.append(TrajectoryPoint(n, eps, tuple(float(v) for v in w), obj,
                                    max(kkt.stationarity_residual, -kkt.min_mu)))
        if prev is not None:
            residuals.append(float(np.max(np.abs(w - prev))))
        prev = w
        iterates.append(w)
    converged = bool(residuals) and residuals[-1] <= limit_tol
    strict = network.strictly_increasing()
    notes = []
    if strict and not converged:
        notes.append("strictly increasing costs but trajectory not Cauchy at tolerance")
    star = project_truncated(_extrapolate_to_zero(schedule.values, iterates), 0.0)
    return RpeLimitResult(cg.Flow(network, ActionDistribution(prev)),
                          cg.Flow(network, star), tuple(traj),
                          tuple(residuals), converged, strict, tuple(notes))


def trajectory_csv(trajectory: Sequence[TrajectoryPoint]) -> str:
    """CSV with columns n, epsilon, coord_1..coord_K, objective, kkt_residual."""
    if not trajectory:
        return ""
    K = len(trajectory[0].weights)
    buf = io.StringIO()
    cols = ["n", "epsilon"] + [f"coord_{k + 1}" for k in range(K)] + ["objective", "kkt_residual"]
    buf.write(",".join(cols) + "\n")
    for p in trajectory:
        row = [str(p.n), repr(p.epsilon)] + [repr(v) for v in p.weights]
        row += [repr(p.objective), repr(p.kkt_residual)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Best-response fixed point for general games


@dataclass(frozen=True)
class FixedPointOptions:
    tol: float = 1e-6            # sup-norm distance to the attainable set
    tie_tol: float = 1e-7        # payoff window defining the tie set
    damping: float = 0.3
    max_iters: int = 2000
    mc: gm.MonteCarloConfig = gm.MC_DEFAULT


@dataclass(frozen=True)
class FixedPointResult:
    profile: gm.RandomizedProfile
    summary: ActionDistribution
    residual: float
    iterations: int
    tie_sets: dict
    converged: bool


def _tie_sets(game: gm.LargeGame, measure: gm.PerturbationMeasure, tie_tol: float,
              mc: gm.MonteCarloConfig) -> dict[str, tuple[int, ...]]:
    out = {}
    for t in game.types:
        vals = gm.expected_payoff_vector(game, t.id, measure, mc)
        top = float(vals.max())
        out[t.id] = tuple(int(k) for k in range(game.K) if top - vals[k] <= tie_tol)
    return out


def _selection_lp(game: gm.LargeGame, tau: np.ndarray, eps: float,
                  ties: Mapping[str, tuple[int, ...]]) -> tuple[float, dict[str, np.ndarray]]:
    """Distance (sup norm) from tau to the attainable summaries
    eps*barycenter + (1-eps) * sum_t mass_t * simplex(tie set of t),
    together with the minimizing per-type tie mixtures."""
    from .lp import simplex_solve

    K = game.K
    nu = np.full(K, 1.0 / K)
    offsets = []
    var_types: list[tuple[str, tuple[int, ...]]] = []
    for t in game.types:
        var_types.append((t.id, ties[t.id]))
    n_mu = sum(len(tie) for _, tie in var_types)
    # variables: mu entries then s
    n = n_mu + 1
    target = tau - eps * nu
    A_ub = []
    b_ub = []
    for sign in (+1.0, -1.0):
        for k in range(K):
            row = np.zeros(n)
            col = 0
            for t, (tid, tie) in zip(game.types, var_types):
                for j, a in enumerate(tie):
                    if a == k:
                        row[col + j] = sign * (1.0 - eps) * t.mass
                col += len(tie)
            row[n_mu] = -1.0
            A_ub.append(row)
            b_ub.append(sign * target[k])
    A_eq = []
    b_eq = []
    col = 0
    for tid, tie in var_types:
        row = np.zeros(n)
        row[col:col + len(tie)] = 1.0
        A_eq.append(row)
        b_eq.append(1.0)
        col += len(tie)
    c = np.zeros(n)
    c[n_mu] = 1.0
    sol = simplex_solve(c, np.array(A_ub), np.array(b_ub), np.array(A_eq), np.array(b_eq),
                        maximize=False)
    if sol.status != "optimal":
        return float("inf"), {}
    mus = {}
    col = 0
    for tid, tie in var_types:
        mu = np.zeros(K)
        mu[list(tie)] = sol.x[col:col + len(tie)]
        if mu.sum() > 0:
            mu /= mu.sum()
        mus[tid] = mu
        col += len(tie)
    return float(sol.value), mus


def _pair_gap(game: gm.LargeGame, template: gm.PerturbationTemplate, tid: str,
              a: int, b: int, tau: np.ndarray, mc: gm.MonteCarloConfig) -> float:
    measure = template(ActionDistribution(tau))
    va = gm.expected_payoff(game, tid, game.actions[a], measure, mc)
    vb = gm.expected_payoff(game, tid, game.actions[b], measure, mc)
    return va - vb


def fixed_point_eps_rpe(game: gm.LargeGame, eps: float,
                        template: gm.PerturbationTemplate | None = None,
                        opts: FixedPointOptions = FixedPointOptions()) -> FixedPointResult:
    """Damped best-response iteration on summaries with an LP certificate.

    The iteration follows the map tau -> sum_t mass_t [(1-eps) u_t + eps nu]
    with u_t the uniform mixture over the tie set at the perturbed summary
    and nu the simplex barycenter.  The map is discontinuous where best
    responses switch, so plain damping oscillates across the switching
    manifold; whenever a type's best response flips between consecutive
    iterates, the crossing point on the segment between them is located by
    bisection and the iterate jumps there, which pins ties down to machine
    precision.  Convergence is declared when tau is within opts.tol (sup
    norm) of the attainable set of the exact correspondence; the returned
    per-type mixtures are the LP minimizers, so the profile
    (1-eps) mu_t + eps nu reproduces the summary up to the residual.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if template is None:
        template = gm.uniform_template(eps)
    K = game.K
    nu = np.full(K, 1.0 / K)
    probe = template(ActionDistribution(nu))
    if not probe.full_support:
        raise ValueError("perturbation template must have a positive uniform component")
    if probe.base_weight < 1.0 - eps - 1e-12:
        raise ValueError("perturbation template puts less than 1 - eps on the base point")
    if K == 1:
        prof = gm.RandomizedProfile.symmetric(game, np.ones(1))
        return FixedPointResult(prof, ActionDistribution(np.ones(1)), 0.0, 0,
                                {t.id: (0,) for t in game.types}, True)

    tau = nu.copy()
    residual_history: list[float] = []
    best = (float("inf"), tau, {t.id: tuple(range(K)) for t in game.types}, {})
    prev_tau: np.ndarray | None = None
    prev_best_action: dict[str, int] | None = None
    for it in range(opts.max_iters):
        measure = template(ActionDistribution(tau))
        vals = {t.id: gm.expected_payoff_vector(game, t.id, measure, opts.mc) for t in game.types}
        ties = {
            tid: tuple(int(k) for k in range(K) if float(v.max()) - v[k] <= opts.tie_tol)
            for tid, v in vals.items()
        }
        residual, mus = _selection_lp(game, tau, eps, ties)
        residual_history.append(residual)
        if residual < best[0]:
            best = (residual, tau.copy(), ties, mus)
        if residual <= opts.tol:
            profile = gm.RandomizedProfile({
                tid: ActionDistribution((1.0 - eps) * mu + eps * nu)
                for tid, mu in mus.items()
            })
            summary = gm.societal_summary(game, profile)
            return FixedPointResult(profile, summary, residual, it + 1, ties, True)
        best_action = {tid: int(np.argmax(v)) for tid, v in vals.items()}
        jumped = False
        if prev_best_action is not None:
            for t in game.types:
                a_new, a_old = best_action[t.id], prev_best_action[t.id]
                if a_new == a_old:
                    continue
                g_lo = _pair_gap(game, template, t.id, a_old, a_new, prev_tau, opts.mc)
                g_hi = float(vals[t.id][a_old] - vals[t.id][a_new])
                # require a genuine sign change: exact ties re-flip on
                # rounding noise and must fall through to the damped step
                if g_lo <= 1e-12 or g_hi >= -1e-12:
                    continue
                lo_t, hi_t = prev_tau, tau
                for _ in range(60):
                    mid = 0.5 * (lo_t + hi_t)
                    g_mid = _pair_gap(game, template, t.id, a_old, a_new, mid, opts.mc)
                    if g_mid > 0.0:
                        lo_t = mid
                    else:
                        hi_t = mid
                prev_tau, prev_best_action = tau, best_action
                tau = 0.5 * (lo_t + hi_t)
                jumped = True
                break
        if jumped:
            continue
        target = np.zeros(K)
        for t in game.types:
            tie = ties[t.id]
            u = np.zeros(K)
            u[list(tie)] = 1.0 / len(tie)
            target += t.mass * ((1.0 - eps) * u + eps * nu)
        prev_tau, prev_best_action = tau, best_action
        tau = (1.0 - opts.damping) * tau + opts.damping * target
    raise SolverDiverged(
        f"best-response iteration not within {opts.tol} after {opts.max_iters} steps "
        f"(best residual {best[0]:.3e})",
        best=best[1], residual=best[0], history=residual_history,
    )


@dataclass(frozen=True)
class GameLimitResult:
    profile: gm.RandomizedProfile
    extrapolated_profile: gm.RandomizedProfile
    summaries: tuple[tuple[float, ...], ...]
    per_type_cauchy: tuple[float, ...]
    summary_cauchy: tuple[float, ...]
    profile_converged: bool
    summary_converged: bool
    notes: tuple[str, ...]

    @property
    def converged(self) -> bool:
        return self.profile_converged and self.summary_converged


def rpe_limit_game(game: gm.LargeGame, schedule: EpsSchedule,
                   template_factory: Callable[[float], gm.PerturbationTemplate] | None = None,
                   opts: FixedPointOptions = FixedPointOptions(),
                   limit_tol: float = 5e-3) -> GameLimitResult:
    """Run the fixed point along the schedule; convergence holds when both
    the per-type profiles and the summaries form Cauchy sequences at the
    tolerance (the two limit conditions checked numerically)."""
    if template_factory is None:
        template_factory = gm.uniform_template
    profiles: list[gm.RandomizedProfile] = []
    summaries: list[np.ndarray] = []
    per_type: list[float] = []
    per_summary: list[float] = []
    notes: list[str] = []
    for eps in schedule.values:
        res = fixed_point_eps_rpe(game, eps, template_factory(eps), opts)
        profiles.append(res.profile)
        summaries.append(res.summary.weights)
        if len(profiles) > 1:
            prev, cur = profiles[-2], profiles[-1]
            per_type.append(max(
                float(np.max(np.abs(prev.for_type(t.id).weights - cur.for_type(t.id).weights)))
                for t in game.types
            ))
            per_summary.append(float(np.max(np.abs(summaries[-2] - summaries[-1]))))
    prof_ok = bool(per_type) and per_type[-1] <= limit_tol
    summ_ok = bool(per_summary) and per_summary[-1] <= limit_tol
    if not prof_ok:
        notes.append("per-type profiles not Cauchy at tolerance; limit points reported as-is")
    min_coord = float(np.min(summaries[-1]))
    notes.append(f"final summary minimum coordinate {min_coord:.6g}")
    extrapolated = gm.RandomizedProfile({
        t.id: project_truncated(_extrapolate_to_zero(
            schedule.values, [p.for_type(t.id).weights for p in profiles]), 0.0)
        for t in game.types
    })
    return GameLimitResult(profiles[-1], extrapolated,
                           tuple(tuple(map(float, s)) for s in summaries),
                           tuple(per_type), tuple(per_summary), prof_ok, summ_ok, tuple(notes))
