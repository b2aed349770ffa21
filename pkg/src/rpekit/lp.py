"""Dense two-phase simplex method for small linear programs.

Solves  min/max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.

Tableau implementation sized for the package's needs (dominance tests over
simplex grids, tie-mixture selection): hundreds to a few thousand rows,
few variables.  Dantzig pricing with a switch to Bland's rule when the
objective stalls, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
STALL_LIMIT = 50


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded | maxiter
    x: np.ndarray
    value: float


def _run(T: np.ndarray, basis: np.ndarray, cost: np.ndarray, max_pivots: int) -> str:
    """Minimize cost over the canonical tableau T (last column is b)."""
    m = T.shape[0]
    obj = np.concatenate([cost, [0.0]]).astype(float)
    for i in range(m):
        cb = obj[basis[i]]
        if cb != 0.0:
            obj -= cb * T[i]
    bland = False
    stall = 0
    last_val = obj[-1]
    for _ in range(max_pivots):
        reduced = obj[:-1]
        if bland:
            negs = np.nonzero(reduced < -PIVOT_TOL)[0]
            if negs.size == 0:
                return "optimal"
            j = int(negs[0])
        else:
            j = int(np.argmin(reduced))
            if reduced[j] >= -PIVOT_TOL:
                return "optimal"
        col = T[:, j]
        pos = col > PIVOT_TOL
        if not np.any(pos):
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[pos] = T[pos, -1] / col[pos]
        r = np.min(ratios)
        cand = np.nonzero(ratios <= r + PIVOT_TOL)[0]
        i = int(cand[np.argmin(basis[cand])])  # lowest-index tie break
        piv = T[i, j]
        T[i] /= piv
        factors = T[:, j].copy()
        factors[i] = 0.0
        T -= np.outer(factors, T[i])
        obj -= obj[j] * T[i]
        basis[i] = j
        T[:, -1] = np.maximum(T[:, -1], 0.0)
        if obj[-1] < last_val - PIVOT_TOL:
            stall = 0
            last_val = obj[-1]
        else:
            stall += 1
            if stall > STALL_LIMIT:
                bland = True
    return "maxiter"


def simplex_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None,
                  maximize: bool = False, max_pivots: int = 50_000) -> LpSolution:
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    rows = []
    rhs = []
    kinds = []  # "ub" or "eq", post sign-normalization
    if A_ub is not None and len(np.atleast_2d(A_ub)):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        for row, b in zip(A_ub, b_ub):
            if b < 0.0:
                rows.append(-row)
                rhs.append(-b)
                kinds.append("ge")
            else:
                rows.append(row)
                rhs.append(b)
                kinds.append("le")
    if A_eq is not None and len(np.atleast_2d(A_eq)):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for row, b in zip(A_eq, b_eq):
            if b < 0.0:
                rows.append(-row)
                rhs.append(-b)
            else:
                rows.append(row)
                rhs.append(b)
            kinds.append("eq")
    m = len(rows)
    if m == 0:
        raise ValueError("no constraints")
    A = np.array(rows)
    b = np.array(rhs)

    n_slack = sum(1 for k in kinds if k in ("le", "ge"))
    n_art = sum(1 for k in kinds if k in ("ge", "eq"))
    total = n + n_slack + n_art
    T = np.zeros((m, total + 1))
    T[:, :n] = A
    T[:, -1] = b
    basis = np.zeros(m, dtype=int)
    s = n
    a = n + n_slack
    art_cols = []
    for i, kind in enumerate(kinds):
        if kind == "le":
            T[i, s] = 1.0
            basis[i] = s
            s += 1
        elif kind == "ge":
            T[i, s] = -1.0
            s += 1
            T[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1
        else:
            T[i, a] = 1.0
            basis[i] = a
            art_cols.append(a)
            a += 1

    obj_sign = -1.0 if maximize else 1.0

    if art_cols:
        phase1 = np.zeros(total)
        phase1[art_cols] = 1.0
        status = _run(T, basis, phase1, max_pivots)
        if status != "optimal":
            return LpSolution(status, np.zeros(n), float("nan"))
        art_value = float(sum(T[i, -1] for i in range(m) if basis[i] in art_cols))
        if art_value > 1e-7:
            return LpSolution("infeasible", np.zeros(n), float("nan"))
        # pivot basic artificials out where possible, else their rows are redundant
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] not in art_cols:
                continue
            pivot_col = None
            for j in range(n + n_slack):
                if abs(T[i, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col is None:
                keep[i] = False
                continue
            piv = T[i, pivot_col]
            T[i] /= piv
            factors = T[:, pivot_col].copy()
            factors[i] = 0.0
            T -= np.outer(factors, T[i])
            basis[i] = pivot_col
        T = T[keep]
        basis = basis[keep]
        m = T.shape[0]
        T = np.delete(T, art_cols, axis=1)
        total = n + n_slack

    phase2 = np.zeros(total)
    phase2[:n] = obj_sign * c
    status = _run(T, basis, phase2, max_pivots)
    x = np.zeros(total)
    for i in range(T.shape[0]):
        if basis[i] < total:
            x[basis[i]] = T[i, -1]
    xi = x[:n]
    return LpSolution(status, xi, float(c @ xi))
