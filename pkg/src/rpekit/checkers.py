"""Decision procedures for equilibrium and refinement properties.

Every check returns a :class:`CheckReport` carrying a verdict, witnesses or
margins, and a full configuration echo (grids, tolerances, seeds), so runs
are reproducible from the report alone.  Grid-based verdicts are
semi-decisions: a failed dominance test exhibits a witness that is valid for
the continuous statement, while "pass" means "pass on this grid" and the
caveat is recorded.

Aggregate robustness is existential over perturbation sequences, so the
toolkit only certifies a given family or reports a failed bounded search; it
never claims nonexistence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import game as gm
from . import payoff as px
from .lp import simplex_solve
from .simplex import ActionDistribution, as_weights, simplex_grid

CertificateFamily = Callable[[int, ActionDistribution], gm.PerturbationMeasure]


@dataclass
class CheckReport:
    name: str
    verdict: str  # pass | fail | inconclusive
    witnesses: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "margins": self.margins,
            "config": self.config,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# Nash


def check_nash(game: gm.LargeGame, profile: gm.RandomizedProfile, tol: float = 1e-6) -> CheckReport:
    """Every action a type plays with weight > tol must attain that type's
    best payoff at the profile's summary, within tol."""
    tau = gm.societal_summary(game, profile)
    witnesses = []
    worst_gap = 0.0
    weighted_regret = 0.0
    for t in game.types:
        h = profile.for_type(t.id).weights
        vals = np.array([gm.eval_payoff(game, t.id, a, tau) for a in game.actions])
        top = float(vals.max())
        weighted_regret += t.mass * float(h @ (top - vals))
        for k, a in enumerate(game.actions):
            if h[k] > tol:
                gap = top - float(vals[k])
                worst_gap = max(worst_gap, gap)
                if gap > tol:
                    better = game.actions[int(np.argmax(vals))]
                    witnesses.append({
                        "type": t.id, "action": a, "better_action": better,
                        "payoff": float(vals[k]), "best_payoff": top,
                        "summary": tau.tolist(),
                    })
    verdict = "fail" if witnesses else "pass"
    return CheckReport(
        "nash", verdict, witnesses,
        margins={"worst_support_gap": worst_gap, "mass_weighted_regret": weighted_regret},
        config={"tol": tol, "summary": tau.tolist()},
    )


# ---------------------------------------------------------------------------
# Admissibility (weak dominance on a grid, via LPs)


def _singleton_breakpoints(expr: px.Expr) -> set[tuple[int, float]]:
    """(coordinate, breakpoint) pairs from subtrees that reference exactly
    one single coordinate."""
    out: set[tuple[int, float]] = set()

    def visit(node: px.Expr):
        groups = px.coord_groups(node)
        if isinstance(node, (px.Piecewise, px.Min, px.Max)) and len(groups) == 1:
            (g,) = groups
            if len(g) == 1:
                (k,) = g
                for b in px.univariate_kinks(node):
                    out.add((k, b))
                return
        for c in node.children():
            visit(c)
        if isinstance(node, px.Piecewise):
            visit(node.arg)

    visit(expr)
    return out


def dominance_grid(game: gm.LargeGame, m: int) -> np.ndarray:
    """simplex_grid(K, m) augmented with cross-sections at every declared or
    detected single-coordinate breakpoint of any payoff."""
    K = game.K
    pts = [simplex_grid(K, m)]
    marks: set[tuple[int, float]] = set()
    for t in game.types:
        for e in t.payoffs:
            marks |= _singleton_breakpoints(e)
    extra = []
    for k, b in sorted(marks):
        if not 0.0 < b < 1.0:
            continue
        rest = 1.0 - b
        for j in range(K):
            if j == k:
                continue
            p = np.zeros(K)
            p[k] = b
            p[j] = rest
            extra.append(p)
        p = np.full(K, rest / max(K - 1, 1))
        p[k] = b
        extra.append(p)
    if extra:
        pts.append(np.array(extra))
    allpts = np.vstack(pts)
    # dedupe on rounded keys
    keys = np.round(allpts, 12)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return allpts[np.sort(idx)]


def check_admissible(game: gm.LargeGame, profile: gm.RandomizedProfile,
                     grid_m: int = 50, tol: float = 1e-7) -> CheckReport:
    """No supported action may be weakly dominated by a mixture.

    For each supported action a, a first LP maximizes the worst-case surplus
    of a mixture over a on the grid (positive optimum: strict dominance); a
    second LP maximizes total surplus subject to dominance everywhere on the
    grid (a positive pointwise margin then exhibits weak dominance).  "pass"
    is pass-on-grid and the grid resolution is echoed.
    """
    if grid_m < 2:
        raise ValueError("grid_m must be >= 2")
    K = game.K
    grid = dominance_grid(game, grid_m)
    G = grid.shape[0]
    witnesses = []
    margins = {}
    inconclusive = []
    for t in game.types:
        h = profile.for_type(t.id).weights
        U = np.column_stack([t.payoffs[k](grid) for k in range(K)])
        for k, a in enumerate(game.actions):
            if h[k] <= tol:
                continue
            M = U - U[:, [k]]  # surplus of each pure action over a, per grid point
            # phase 1: max_{xi in simplex} min_g surplus(xi)
            n = K + 2  # xi, v+, v-
            A_ub = np.hstack([-M, np.ones((G, 1)), -np.ones((G, 1))])
            b_ub = np.zeros(G)
            A_eq = np.zeros((1, n))
            A_eq[0, :K] = 1.0
            c = np.zeros(n)
            c[K], c[K + 1] = 1.0, -1.0
            sol = simplex_solve(c, A_ub, b_ub, A_eq, [1.0], maximize=True)
            if sol.status != "optimal":
                inconclusive.append({"type": t.id, "action": a, "reason": f"phase-1 LP {sol.status}"})
                continue
            value = float(sol.value)
            margins[f"{t.id}:{a}:worst_case_surplus"] = value
            if value > tol:
                xi = sol.x[:K] / max(sol.x[:K].sum(), 1e-300)
                witnesses.append({
                    "type": t.id, "action": a, "dominating_mixture": xi.tolist(),
                    "kind": "strict-on-grid", "margin": value,
                })
                continue
            if value < -tol:
                continue  # no mixture weakly dominates a on this grid
            # phase 2: max total surplus with surplus >= 0 everywhere
            n2 = K
            A_ub2 = np.vstack([-M, np.ones((1, K))])
            b_ub2 = np.concatenate([np.zeros(G), [1.0]])
            c2 = M.sum(axis=0)
            sol2 = simplex_solve(c2, A_ub2, b_ub2, maximize=True)
            if sol2.status != "optimal":
                inconclusive.append({"type": t.id, "action": a, "reason": f"phase-2 LP {sol2.status}"})
                continue
            xi = sol2.x
            s = xi.sum()
            if s > 1e-12:
                xi = xi / s
            point_surplus = M @ xi
            margin = float(point_surplus.max())
            margins[f"{t.id}:{a}:best_point_surplus"] = margin
            if margin > tol and float(point_surplus.min()) >= -tol:
                g_star = int(np.argmax(point_surplus))
                witnesses.append({
                    "type": t.id, "action": a, "dominating_mixture": xi.tolist(),
                    "kind": "weak-on-grid", "margin": margin,
                    "strict_at": grid[g_star].tolist(),
                })
    config = {"grid_m": grid_m, "grid_points": G, "tol": tol}
    if witnesses:
        return CheckReport("admissible", "fail", witnesses, margins, config)
    if inconclusive:
        return CheckReport("admissible", "inconclusive", inconclusive, margins, config,
                           notes=["LP did not solve; no verdict"])
    return CheckReport("admissible", "pass", [], margins, config,
                       notes=[f"pass-on-grid at resolution 1/{grid_m}; "
                              "dominance is only grid-decidable for continuous payoffs"])


# ---------------------------------------------------------------------------
# eps-robust perfection


def check_eps_rpe(game: gm.LargeGame, profile: gm.RandomizedProfile, eps: float,
                  template: gm.PerturbationTemplate, rational_mass: float = 1.0,
                  tol: float = 1e-6, mc: gm.MonteCarloConfig = gm.MC_DEFAULT) -> CheckReport:
    """Full support plus: a mass >= rational_mass of types puts weight <= eps
    on every action that is worse by more than tol under the perturbed
    summary."""
    if not 1.0 - eps < rational_mass <= 1.0 + 1e-12:
        raise ValueError("rational_mass must lie in (1 - eps, 1]")
    tau = gm.societal_summary(game, profile)
    measure = template(tau)
    if not measure.full_support:
        raise ValueError("perturbation must have full support (positive uniform component)")
    notes = []
    if measure.base_weight > 1.0 - eps + 1e-12:
        notes.append(
            f"perturbation puts {measure.base_weight} > 1 - eps on the base point; accepted "
            "under at-least-(1-eps) semantics (the two definitions in use differ here)"
        )
    witnesses = []
    support_fail = []
    violating_mass = 0.0
    min_support = np.inf
    worst_excess = 0.0
    for t in game.types:
        h = profile.for_type(t.id).weights
        min_support = min(min_support, float(h.min()))
        if float(h.min()) <= 0.0:
            support_fail.append({"type": t.id, "weights": h.tolist()})
        vals = gm.expected_payoff_vector(game, t.id, measure, mc)
        top = float(vals.max())
        bad = False
        for k, a in enumerate(game.actions):
            if top - vals[k] > tol and h[k] > eps + 1e-12:
                bad = True
                worst_excess = max(worst_excess, float(h[k] - eps))
                witnesses.append({
                    "type": t.id, "action": a, "weight": float(h[k]),
                    "gap_below_best": float(top - vals[k]),
                    "best_action": game.actions[int(np.argmax(vals))],
                })
        if bad:
            violating_mass += t.mass
    rational = 1.0 - violating_mass
    ok = not support_fail and rational >= rational_mass - 1e-12
    margins = {
        "min_support_weight": float(min_support),
        "rational_mass": rational,
        "worst_weight_excess": worst_excess,
    }
    config = {
        "eps": eps, "tol": tol, "rational_mass_required": rational_mass,
        "mc": mc.as_dict(), "summary": tau.tolist(),
        "perturbation": _measure_echo(measure),
    }
    if support_fail:
        witnesses = support_fail + witnesses
    return CheckReport("eps_rpe", "pass" if ok else "fail", witnesses, margins, config, notes)


def _measure_echo(measure: gm.PerturbationMeasure) -> dict:
    return {
        "base": measure.base.tolist(),
        "base_weight": measure.base_weight,
        "atoms": [[v.tolist(), w] for v, w in measure.atoms],
        "uniform_weight": measure.uniform_weight,
        "epsilon": measure.epsilon,
    }


# ---------------------------------------------------------------------------
# Aggregate robustness certificates


def standard_certificate_family(vertex_weights: Mapping[int, float] | None = None,
                                uniform_share: float = 1.0,
                                eps_of_n: Callable[[int], float] = lambda n: 1.0 / (6 * n),
                                ) -> CertificateFamily:
    """phi_n(tau) = (1 - eps_n) dirac(tau) + eps_n (vertex atoms + uniform)."""
    def family(n: int, tau: ActionDistribution) -> gm.PerturbationMeasure:
        return gm.PerturbationMeasure.mix(tau, eps_of_n(n), vertex_weights, uniform_share)
    return family


def per_type_own_action_family(game: gm.LargeGame, profile: gm.RandomizedProfile,
                               eps_of_n: Callable[[int], float] = lambda n: 1.0 / (6 * n),
                               ) -> dict[str, CertificateFamily]:
    """One family per type, placing the vanishing atom on the type's own
    most-played action: phi_n(tau) = (1-e) dirac(tau) + (e - e^2) dirac(own)
    + e^2 uniform."""
    out: dict[str, CertificateFamily] = {}
    for t in game.types:
        own = int(np.argmax(profile.for_type(t.id).weights))

        def family(n: int, tau: ActionDistribution, _own=own) -> gm.PerturbationMeasure:
            e = eps_of_n(n)
            return gm.PerturbationMeasure.mix(tau, e, vertex_weights={_own: 1.0 - e},
                                              uniform_share=e)
        out[t.id] = family
    return out


def check_aggregate_robustness_certificate(
        game: gm.LargeGame, profile: gm.RandomizedProfile,
        family: CertificateFamily | Mapping[str, CertificateFamily],
        n_max: int = 10, tol: float = 1e-6,
        mc: gm.MonteCarloConfig = gm.MC_DEFAULT) -> CheckReport:
    """Certify the given family: along n = 1..n_max every supported action of
    every type must be a best response to the perturbed summary.  This
    certifies the refinement's existential along one family; failing here
    never proves nonexistence."""
    tau = gm.societal_summary(game, profile)
    families: dict[str, CertificateFamily]
    if callable(family):
        families = {t.id: family for t in game.types}
    else:
        families = dict(family)
    # structural validation: non-base mass and base offset must not grow
    for tid, fam in families.items():
        prev_mass, prev_off = np.inf, np.inf
        for n in range(1, n_max + 1):
            measure = fam(n, tau)
            if not measure.full_support:
                raise ValueError(f"family for type {tid!r} lacks full support at n={n}")
            off = float(np.max(np.abs(measure.base.weights - tau.weights)))
            mass = 1.0 - measure.base_weight
            if mass > prev_mass + 1e-12 or off > prev_off + 1e-12:
                raise ValueError(
                    f"family for type {tid!r} does not shrink towards the summary at n={n}"
                )
            prev_mass, prev_off = mass, off
    witnesses = []
    min_margin = np.inf
    for n in range(1, n_max + 1):
        for t in game.types:
            h = profile.for_type(t.id).weights
            measure = families[t.id](n, tau)
            vals = gm.expected_payoff_vector(game, t.id, measure, mc)
            top = float(vals.max())
            for k, a in enumerate(game.actions):
                if h[k] > tol:
                    gap = top - float(vals[k])
                    min_margin = min(min_margin, tol - gap)
                    if gap > tol:
                        witnesses.append({
                            "n": n, "type": t.id, "action": a, "gap_below_best": gap,
                            "best_action": game.actions[int(np.argmax(vals))],
                        })
    verdict = "fail" if witnesses else "pass"
    return CheckReport(
        "aggregate_robustness_certificate", verdict, witnesses,
        margins={"min_margin": float(min_margin)},
        config={"n_max": n_max, "tol": tol, "mc": mc.as_dict(), "summary": tau.tolist()},
        notes=["certificate along one family; a failure does not prove nonexistence"],
    )


def default_certificate_grid(K: int, actions: Sequence[str]) -> list[tuple[str, CertificateFamily]]:
    grid: list[tuple[str, CertificateFamily]] = [
        ("uniform", standard_certificate_family(None, 1.0)),
    ]
    for k, a in enumerate(actions):
        grid.append((f"vertex {a} w=1/2 + uniform w=1/2",
                     standard_certificate_family({k: 0.5}, 0.5)))
        grid.append((f"vertex {a} w=3/4 + uniform w=1/4",
                     standard_certificate_family({k: 0.75}, 0.25)))
    if K > 1:
        grid.append(("all vertices w=1/2 (equal) + uniform w=1/2",
                     standard_certificate_family({k: 0.5 / K for k in range(K)}, 0.5)))
    return grid


def search_perturbation_certificate(game: gm.LargeGame, profile: gm.RandomizedProfile,
                                    n_max: int = 10, tol: float = 1e-6,
                                    grid: Sequence[tuple[str, CertificateFamily]] | None = None,
                                    mc: gm.MonteCarloConfig = gm.MC_DEFAULT) -> CheckReport:
    """Bounded search for a certifying family over a parametric grid of
    vertex-atom weights plus a uniform component.  Returns the first passing
    family or the best near-miss; never claims nonexistence."""
    candidates = list(grid) if grid is not None else default_certificate_grid(game.K, game.actions)
    best_label, best_gap = None, np.inf
    tried = []
    for label, fam in candidates:
        rep = check_aggregate_robustness_certificate(game, profile, fam, n_max=n_max,
                                                     tol=tol, mc=mc)
        tried.append(label)
        if rep.passed:
            rep.config["family"] = label
            rep.config["search"] = {"tried": tried, "n_max": n_max}
            rep.name = "perturbation_certificate_search"
            return rep
        worst = max((w["gap_below_best"] for w in rep.witnesses), default=np.inf)
        if worst < best_gap:
            best_gap, best_label = worst, label
    return CheckReport(
        "perturbation_certificate_search", "fail", [],
        margins={"best_near_miss_gap": float(best_gap)},
        config={"search": {"tried": tried, "n_max": n_max, "tol": tol},
                "nearest_family": best_label},
        notes=["fail-within-search: no family in the bounded grid certifies; "
               "this does not prove that no certifying sequence exists"],
    )


# ---------------------------------------------------------------------------
# Potential structure


def _spread_violation(U: np.ndarray, P: np.ndarray) -> tuple[float, int, int, int]:
    """Worst |(U_m - U_l) - (P_m - P_l)| over grid rows and action pairs;
    equals the rowwise spread of R = U - P."""
    R = U - P
    hi = R.argmax(axis=1)
    lo = R.argmin(axis=1)
    spread = R.max(axis=1) - R.min(axis=1)
    g = int(np.argmax(spread))
    return float(spread[g]), g, int(hi[g]), int(lo[g])


def check_potential(game: gm.LargeGame, potential: Mapping[str, px.Expr],
                    grid_m: int = 30, tol: float = 1e-9) -> CheckReport:
    """Payoff differences across actions must equal potential differences,
    for every type, action pair, and grid summary."""
    for a in game.actions:
        if a not in potential:
            raise ValueError(f"potential missing for action {a!r}")
    grid = simplex_grid(game.K, grid_m)
    P = np.column_stack([potential[a](grid) for a in game.actions])
    worst = 0.0
    witnesses = []
    for t in game.types:
        U = np.column_stack([e(grid) for e in t.payoffs])
        v, g, m_hi, m_lo = _spread_violation(U, P)
        worst = max(worst, v)
        if v > tol:
            witnesses.append({
                "type": t.id, "summary": grid[g].tolist(),
                "action_pair": [game.actions[m_hi], game.actions[m_lo]],
                "violation": v,
            })
    return CheckReport(
        "potential", "fail" if witnesses else "pass", witnesses,
        margins={"worst_violation": worst},
        config={"grid_m": grid_m, "grid_points": int(grid.shape[0]), "tol": tol},
    )


@dataclass(frozen=True)
class FindPotentialResult:
    values: dict | None          # action -> array of potential values on the grid
    grid: np.ndarray
    report: CheckReport


def find_potential(game: gm.LargeGame, grid_m: int = 30, tol: float = 1e-9) -> FindPotentialResult:
    """Candidate potential from a reference type (first action normalized to
    zero); validated against all other types on the grid."""
    grid = simplex_grid(game.K, grid_m)
    t0 = game.types[0]
    U0 = np.column_stack([e(grid) for e in t0.payoffs])
    P = U0 - U0[:, [0]]
    worst = 0.0
    witnesses = []
    for t in game.types[1:]:
        U = np.column_stack([e(grid) for e in t.payoffs])
        v, g, m_hi, m_lo = _spread_violation(U, P)
        worst = max(worst, v)
        if v > tol:
            witnesses.append({
                "type": t.id, "summary": grid[g].tolist(),
                "action_pair": [game.actions[m_hi], game.actions[m_lo]],
                "violation": v,
            })
    config = {"grid_m": grid_m, "reference_type": t0.id, "tol": tol,
              "normalization": f"{game.actions[0]} -> 0"}
    if witnesses:
        report = CheckReport("find_potential", "fail", witnesses,
                             margins={"worst_violation": worst}, config=config,
                             notes=["no potential: candidate from reference type rejected"])
        return FindPotentialResult(None, grid, report)
    values = {a: P[:, k].copy() for k, a in enumerate(game.actions)}
    report = CheckReport("find_potential", "pass", [],
                         margins={"worst_violation": worst}, config=config)
    return FindPotentialResult(values, grid, report)


# ---------------------------------------------------------------------------
# Two-path construction: admissible Nash -> eps-robust perfection


def two_path_eps_rpe_certificate(game: gm.LargeGame, profile: gm.RandomizedProfile,
                                 eps: float, grid_m: int = 200, tol: float = 1e-9,
                                 mc: gm.MonteCarloConfig = gm.MC_DEFAULT,
                                 ) -> tuple[gm.RandomizedProfile, gm.PerturbationTemplate, CheckReport]:
    """For a two-action single-type game and an admissible Nash profile,
    build a nearby full-support profile and a perturbation under which it is
    an eps-robust perfect equilibrium, then verify it.

    Both-actions-supported case: place two atoms where the payoff difference
    has opposite signs and solve the mixing weight that makes the actions
    exactly indifferent under the perturbation.  One-sided case: tremble the
    profile by eps' < eps and tilt the perturbation towards a point where the
    supported action strictly wins.
    """
    if game.K != 2:
        raise ValueError("construction applies to two-action games")
    if len(game.types) != 1:
        raise ValueError("construction applies to single-type games")
    t0 = game.types[0]
    tau_star = gm.societal_summary(game, profile)
    grid = simplex_grid(2, grid_m)
    diff = t0.payoffs[0](grid) - t0.payoffs[1](grid)
    d_uniform = _uniform_diff(game, t0, mc)
    nu = np.full(2, 0.5)

    if float(np.max(np.abs(diff))) <= tol:
        # identical payoff functions: everything is a best response
        template = gm.uniform_template(eps)
        prof_eps = gm.RandomizedProfile({
            t0.id: ActionDistribution((1.0 - eps) * profile.for_type(t0.id).weights + eps * nu)
        })
        rep = check_eps_rpe(game, prof_eps, eps, template, tol=max(tol, 1e-9), mc=mc)
        rep.config["construction"] = "identical payoffs"
        return prof_eps, template, rep

    w_star = tau_star.weights
    if min(w_star) > tol:
        # both supported: need exact indifference under the perturbation
        g_hi, g_lo = int(np.argmax(diff)), int(np.argmin(diff))
        d1, d2 = float(diff[g_hi]), float(diff[g_lo])
        if d1 <= tol or d2 >= -tol:
            raise ValueError("profile supports a weakly dominated action; not an admissible Nash input")
        base_gap = float(t0.payoffs[0](w_star[None, :])[0] - t0.payoffs[1](w_star[None, :])[0])
        for gamma in (1e-2, 1e-3, 1e-4, 1e-6):
            # solve (1-eps)*base_gap + eps[(1-gamma)(w d1 + (1-w) d2) + gamma dU] = 0
            rhs = -((1.0 - eps) * base_gap / eps + gamma * d_uniform) / (1.0 - gamma)
            w = (rhs - d2) / (d1 - d2)
            if 1e-9 <= w <= 1.0 - 1e-9:
                break
        else:
            raise ValueError("could not balance the two-sided perturbation")
        atoms = [(grid[g_hi], (1.0 - gamma) * w), (grid[g_lo], (1.0 - gamma) * (1.0 - w))]

        def template(tau, _atoms=tuple(atoms), _gamma=gamma):
            return gm.PerturbationMeasure.mix(tau, eps, uniform_share=_gamma, atoms=list(_atoms))

        prof_eps = gm.RandomizedProfile({
            t0.id: ActionDistribution((1.0 - eps) * profile.for_type(t0.id).weights
                                      + eps * tau_star.weights)
        })
        rep = check_eps_rpe(game, prof_eps, eps, template, tol=max(tol, 1e-9), mc=mc)
        rep.config["construction"] = {"case": "interior", "gamma": gamma, "atom_weight": w}
        return prof_eps, template, rep

    # one-sided support
    i = int(np.argmax(w_star))
    j = 1 - i
    signed = diff if i == 0 else -diff
    g3 = int(np.argmax(signed))
    if float(signed[g3]) <= tol:
        raise ValueError("supported action never strictly beats the other; degenerate input")
    tau3 = grid[g3]
    d_u_signed = d_uniform if i == 0 else -d_uniform
    for gamma in (0.5, 0.1, 0.01, 1e-3):
        zeta_gap = (1.0 - gamma) * float(signed[g3]) + gamma * d_u_signed
        if zeta_gap > tol:
            break
    else:
        raise ValueError("could not keep the tilted perturbation favorable")
    for eps_prime in (eps / 2.0, eps / 8.0, eps / 64.0, eps / 512.0):
        w_eps = np.zeros(2)
        w_eps[i], w_eps[j] = 1.0 - eps_prime, eps_prime
        base_gap = float(t0.payoffs[i](w_eps[None, :])[0] - t0.payoffs[j](w_eps[None, :])[0])
        total = (1.0 - eps) * base_gap + eps * zeta_gap
        if total > tol:
            break
    else:
        raise ValueError("no tremble size keeps the supported action optimal")

    def template(tau, _tau3=tuple(tau3), _gamma=gamma):
        return gm.PerturbationMeasure.mix(tau, eps, uniform_share=_gamma,
                                          atoms=[(np.array(_tau3), 1.0 - _gamma)])

    prof_eps = gm.RandomizedProfile({t0.id: ActionDistribution(w_eps)})
    rep = check_eps_rpe(game, prof_eps, eps, template, tol=max(tol, 1e-9), mc=mc)
    rep.config["construction"] = {"case": "boundary", "gamma": gamma, "tremble": eps_prime,
                                  "tilt_point": list(map(float, tau3))}
    return prof_eps, template, rep


def _uniform_diff(game: gm.LargeGame, t0: gm.PayoffType, mc: gm.MonteCarloConfig) -> float:
    a = gm.expected_payoff(game, t0.id, game.actions[0],
                           gm.PerturbationMeasure.mix(np.array([0.5, 0.5]), 1.0), mc)
    b = gm.expected_payoff(game, t0.id, game.actions[1],
                           gm.PerturbationMeasure.mix(np.array([0.5, 0.5]), 1.0), mc)
    return a - b
