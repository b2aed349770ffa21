"""Batch command-line front end.

Commands load a game or network description, run the requested solver or
checker pipeline, and write reports (JSON) and tables (CSV) into the output
directory.  Every output embeds the fully resolved run configuration and the
toolkit version; re-running with the same inputs and seed reproduces the
files byte for byte.  Files are written atomically (temp file + rename).

Exit codes: 0 success / all checks pass; 1 usage or input error;
2 checks failed (or converged with a failing check for `rpe`);
3 solver did not converge.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from . import checkers as ck
from . import congestion as cg
from . import game as gm
from . import simulate as sim
from . import solvers as sv
from .simplex import ActionDistribution

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2
EXIT_NOT_CONVERGED = 3


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_coerce) + "\n"


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, ActionDistribution):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _sniff_input(path: str):
    """A network file has edges; a game file has types."""
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise gm.GameFormatError(f"{path}: no such file")
    except json.JSONDecodeError as exc:
        raise gm.GameFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if isinstance(data, dict) and "edges" in data:
        return "network", cg.network_from_dict(data, source=path)
    if isinstance(data, dict) and "types" in data:
        return "game", gm.game_from_dict(data, source=path)
    raise gm.GameFormatError(f"{path}: neither a network (edges) nor a game (types) file")


def _resolve_profile(spec: str, game: gm.LargeGame) -> gm.RandomizedProfile:
    """Either a path to a profile JSON or inline comma-separated weights
    applied to every type."""
    if "," in spec and not Path(spec).exists():
        try:
            weights = np.array([float(v) for v in spec.split(",")])
        except ValueError as exc:
            raise gm.GameFormatError(f"inline profile {spec!r}: {exc}")
        return gm.RandomizedProfile.symmetric(game, weights)
    return gm.load_profile(spec, game)


def _schedule_from_args(args) -> sv.EpsSchedule:
    if args.epsilon is not None:
        return sv.EpsSchedule((args.epsilon,))
    return sv.EpsSchedule.harmonic(args.schedule)


def _base_config(args, command: str) -> dict:
    cfg = {"command": command, "version": __version__}
    for key in ("input", "epsilon", "schedule", "grid", "tol", "seed", "mc_samples",
                "out", "format", "profile", "n", "trials"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def cmd_wardrop(args) -> int:
    kind, net = _sniff_input(args.input)
    if kind != "network":
        raise gm.GameFormatError(f"{args.input}: wardrop needs a network file")
    flow = sv.solve_wardrop(net, sv.BeckmannOptions(tol=args.tol))
    costs = cg.path_costs(net, flow.dist.weights, 0.0)
    min_cost = float(costs.min())
    used = [bool(w > 1e-4) for w in flow.dist.weights]
    ties = [
        [net.path_names[i], net.path_names[j]]
        for i in range(len(costs)) for j in range(i + 1, len(costs))
        if abs(costs[i] - costs[j]) <= 1e-9 and (used[i] or used[j])
    ]
    report = {
        "config": _base_config(args, "wardrop"),
        "paths": list(net.path_names),
        "flow": flow.dist.tolist(),
        "path_costs": [float(c) for c in costs],
        "social_cost": cg.social_cost(net, flow),
        "used_paths": [p for p, u in zip(net.path_names, used) if u],
        "unused_paths": [p for p, u in zip(net.path_names, used) if not u],
        "cost_ties": ties,
        "wardrop_gap": float(max(
            (costs[i] - min_cost) for i in range(len(costs)) if used[i]
        )),
    }
    _write_atomic(Path(args.out) / "wardrop.json", _dump_json(report))
    print(_dump_json(report), end="")
    return EXIT_OK


def _check_suite_network(net: cg.CongestionNetwork, flow_limit, eps_for_check: float,
                         grid: int, tol: float) -> dict:
    game = cg.as_large_game(net)
    h = gm.RandomizedProfile.symmetric(game, flow_limit.dist.weights)
    reports = {
        "nash": ck.check_nash(game, h, tol=max(tol, 1e-6)),
        "admissible": ck.check_admissible(game, h, grid_m=grid),
        "aggregate_robustness": ck.search_perturbation_certificate(game, h),
    }
    eps_flow = sv.solve_beckmann(net, eps_for_check)
    h_eps = gm.RandomizedProfile.symmetric(game, eps_flow.dist.weights)
    reports["eps_rpe"] = ck.check_eps_rpe(
        game, h_eps, eps_for_check, gm.uniform_template(eps_for_check), tol=1e-6)
    return {k: r.to_dict() for k, r in reports.items()}


def cmd_rpe(args) -> int:
    kind, model = _sniff_input(args.input)
    schedule = _schedule_from_args(args)
    out = Path(args.out)
    if kind == "network":
        net = model
        schedule.check_floor(net.n_paths)
        try:
            res = sv.rpe_limit(net, schedule)
        except sv.SolverDiverged as exc:
            _write_atomic(out / "rpe.json", _dump_json({
                "config": _base_config(args, "rpe"), "converged": False,
                "error": str(exc),
            }))
            return EXIT_NOT_CONVERGED
        _write_atomic(out / "trajectory.csv", sv.trajectory_csv(res.trajectory))
        eps_chk = min(1.0 / 60.0, schedule.values[-1])
        checks = _check_suite_network(net, res.extrapolated, eps_chk, args.grid, args.tol)
        report = {
            "config": _base_config(args, "rpe"),
            "paths": list(net.path_names),
            "limit_flow": res.extrapolated.dist.tolist(),
            "final_iterate": res.flow.dist.tolist(),
            "converged": res.converged,
            "final_cauchy_residual": res.cauchy_residuals[-1] if res.cauchy_residuals else None,
            "strictly_increasing_costs": res.strictly_increasing,
            "checks": checks,
            "notes": list(res.notes),
        }
        _write_atomic(out / "rpe.json", _dump_json(report))
        print(_dump_json(report), end="")
        if not res.converged:
            return EXIT_NOT_CONVERGED
        all_pass = all(c["verdict"] == "pass" for c in checks.values())
        return EXIT_OK if all_pass else EXIT_CHECK_FAILED
    game = model
    try:
        res = sv.rpe_limit_game(game, schedule)
    except sv.SolverDiverged as exc:
        _write_atomic(out / "rpe.json", _dump_json({
            "config": _base_config(args, "rpe"), "converged": False, "error": str(exc),
        }))
        return EXIT_NOT_CONVERGED
    rows = ["n,epsilon," + ",".join(f"coord_{k+1}" for k in range(game.K))]
    for i, (eps, summ) in enumerate(zip(schedule.values, res.summaries), start=1):
        rows.append(",".join([str(i), repr(eps)] + [repr(v) for v in summ]))
    _write_atomic(out / "trajectory.csv", "\n".join(rows) + "\n")
    limit_prof = res.extrapolated_profile
    checks = {
        "nash": ck.check_nash(game, limit_prof, tol=max(args.tol, 1e-6)).to_dict(),
        "admissible": ck.check_admissible(game, limit_prof, grid_m=args.grid).to_dict(),
        "aggregate_robustness": ck.search_perturbation_certificate(game, limit_prof).to_dict(),
    }
    min_coord = min(res.summaries[-1])
    report = {
        "config": _base_config(args, "rpe"),
        "actions": list(game.actions),
        "limit_profile": {tid: d.tolist() for tid, d in limit_prof.items()},
        "limit_summary": list(res.summaries[-1]),
        "summary_min_coordinate": min_coord,
        "boundary_limit": bool(min_coord <= 3.0 * schedule.values[-1]),
        "converged": res.converged,
        "profile_cauchy": res.per_type_cauchy[-1] if res.per_type_cauchy else None,
        "summary_cauchy": res.summary_cauchy[-1] if res.summary_cauchy else None,
        "limit_conditions": {
            "per_type_profiles_converge": res.profile_converged,
            "summaries_converge": res.summary_converged,
        },
        "checks": checks,
        "notes": list(res.notes),
    }
    _write_atomic(out / "rpe.json", _dump_json(report))
    print(_dump_json(report), end="")
    if not res.converged:
        return EXIT_NOT_CONVERGED
    all_pass = all(c["verdict"] == "pass" for c in checks.values())
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def cmd_check(args) -> int:
    kind, model = _sniff_input(args.input)
    game = cg.as_large_game(model) if kind == "network" else model
    profile = _resolve_profile(args.profile, game)
    which = args.checks.split(",") if args.checks != "all" else [
        "nash", "admissible", "eps-rpe", "aggregate-robust"]
    eps = args.epsilon if args.epsilon is not None else 1.0 / 60.0
    reports: dict[str, ck.CheckReport] = {}
    for name in which:
        if name == "nash":
            reports[name] = ck.check_nash(game, profile, tol=args.tol)
        elif name == "admissible":
            reports[name] = ck.check_admissible(game, profile, grid_m=args.grid)
        elif name == "eps-rpe":
            try:
                reports[name] = ck.check_eps_rpe(
                    game, profile, eps, gm.uniform_template(eps), tol=args.tol)
            except ValueError as exc:
                reports[name] = ck.CheckReport("eps_rpe", "fail", [{"reason": str(exc)}],
                                               config={"eps": eps})
        elif name == "aggregate-robust":
            reports[name] = ck.search_perturbation_certificate(game, profile)
        else:
            raise gm.GameFormatError(f"unknown check {name!r}")
    bundle = {
        "config": _base_config(args, "check"),
        "checks": {k: r.to_dict() for k, r in reports.items()},
    }
    _write_atomic(Path(args.out) / "checks.json", _dump_json(bundle))
    print(_dump_json(bundle), end="")
    return EXIT_OK if all(r.passed for r in reports.values()) else EXIT_CHECK_FAILED


def cmd_simulate(args) -> int:
    kind, model = _sniff_input(args.input)
    game = cg.as_large_game(model) if kind == "network" else model
    if args.profile is not None:
        profile = _resolve_profile(args.profile, game)
    else:
        raise gm.GameFormatError("simulate needs --profile")
    out = Path(args.out)
    realization = sim.sample_realization(game, profile, args.n, args.seed)
    _write_atomic(out / "realization.csv", sim.realization_csv(realization))
    n_list = [n for n in (10**3, 10**4, 10**5, 10**6) if n <= args.n] or [args.n]
    elln = sim.elln_report(game, profile, n_list, trials=args.trials, seed=args.seed)
    _write_atomic(out / "elln.csv", sim.elln_csv(elln))
    eps = args.epsilon if args.epsilon is not None else 1.0 / 60.0
    chk = sim.ex_post_check(game, realization, eps, tol=max(args.tol, 1e-9))
    report = {
        "config": _base_config(args, "simulate"),
        "empirical_summary": realization.summary.tolist(),
        "target_summary": gm.societal_summary(game, profile).tolist(),
        "elln": {"mean_errors": elln.mean_errors, "slope": elln.slope},
        "ex_post": chk.to_dict(),
    }
    _write_atomic(out / "simulate.json", _dump_json(report))
    print(_dump_json(report), end="")
    return EXIT_OK


def cmd_poa(args) -> int:
    kind, model = _sniff_input(args.input)
    if kind != "network":
        raise gm.GameFormatError(f"{args.input}: poa needs a network file")
    rep = cg.price_of_anarchy(model, seed=args.seed)
    report = {
        "config": _base_config(args, "poa"),
        "price_of_anarchy": rep.poa,
        "equilibrium_social_cost": rep.equilibrium_cost,
        "min_social_cost": rep.min_cost,
        "min_flow": list(rep.min_flow),
        "per_edge_convex": rep.per_edge_convex,
        "notes": list(rep.notes),
    }
    _write_atomic(Path(args.out) / "poa.json", _dump_json(report))
    print(_dump_json(report), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rpekit",
        description="Solve and verify perturbation-robust equilibria of large games",
    )
    p.add_argument("--version", action="version", version=f"rpekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, profile=False, n=False):
        sp.add_argument("input", help="game or network JSON file")
        sp.add_argument("--epsilon", type=float, default=None,
                        help="single perturbation level (overrides --schedule)")
        sp.add_argument("--schedule", type=int, default=40, metavar="N",
                        help="harmonic schedule length, eps_n = 1/(6n) (default 40)")
        sp.add_argument("--grid", type=int, default=50, help="grid resolution for checks")
        sp.add_argument("--tol", type=float, default=1e-9, help="tolerance")
        sp.add_argument("--seed", type=int, default=0, help="random seed")
        sp.add_argument("--mc-samples", dest="mc_samples", type=int, default=gm.MC_DEFAULT_SAMPLES)
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if profile:
            sp.add_argument("--profile", default=None,
                            help="profile JSON file or inline comma-separated weights")
        if n:
            sp.add_argument("--n", type=int, default=10**5, help="population size")
            sp.add_argument("--trials", type=int, default=20, help="trials per population size")

    sp = sub.add_parser("wardrop", help="unperturbed equilibrium flow of a network")
    common(sp)
    sp.set_defaults(fn=cmd_wardrop)
    sp = sub.add_parser("rpe", help="perturbed-program limit and full check suite")
    common(sp)
    sp.set_defaults(fn=cmd_rpe)
    sp = sub.add_parser("check", help="run refinement checks on a profile")
    common(sp, profile=True)
    sp.add_argument("--checks", default="all",
                    help="comma list: nash,admissible,eps-rpe,aggregate-robust (default all)")
    sp.set_defaults(fn=cmd_check)
    sp = sub.add_parser("simulate", help="finite-population realization and convergence table")
    common(sp, profile=True, n=True)
    sp.set_defaults(fn=cmd_simulate)
    sp = sub.add_parser("poa", help="price of anarchy of a network")
    common(sp)
    sp.set_defaults(fn=cmd_poa)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except gm.GameFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (cg.NetworkModelError, cg.PathLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except sv.SolverDiverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
