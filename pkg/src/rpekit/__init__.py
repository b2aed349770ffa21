"""rpekit: compute and verify perturbation-robust equilibria of games with a
continuum of players and finitely many actions."""

__version__ = "0.1.0"

from .simplex import (
    ActionDistribution,
    TruncatedSimplex,
    beta_marginal_expectation,
    project_truncated,
    simplex_grid,
    uniform_samples,
)
from .game import (
    LargeGame,
    MonteCarloConfig,
    PayoffType,
    PerturbationMeasure,
    RandomizedProfile,
    best_responses,
    eval_payoff,
    expected_payoff,
    load_game,
    load_profile,
    societal_summary,
)
from .congestion import (
    CongestionNetwork,
    Flow,
    as_large_game,
    beckmann_objective,
    enumerate_paths,
    load_network,
    path_cost,
    perturbed_edge_cost,
    price_of_anarchy,
    social_cost,
)
from .solvers import (
    EpsSchedule,
    KktReport,
    SolverDiverged,
    fixed_point_eps_rpe,
    rpe_limit,
    rpe_limit_game,
    solve_beckmann,
    solve_wardrop,
    verify_kkt,
)
from .checkers import (
    CheckReport,
    check_admissible,
    check_aggregate_robustness_certificate,
    check_eps_rpe,
    check_nash,
    check_potential,
    find_potential,
    search_perturbation_certificate,
    two_path_eps_rpe_certificate,
)
from .simulate import Realization, elln_report, ex_post_check, sample_realization
