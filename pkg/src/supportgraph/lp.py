"""Dense two-phase simplex for small linear programs.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0  on a full
tableau.  Pivoting is deterministic: Bland's rule by default (provably
cycle-free), or a most-negative entering rule that falls back to Bland
after a long degenerate streak ("fast" mode, still deterministic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass
class SimplexResult:
    status: str                 # optimal | infeasible | unbounded | stalled
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int):
    tableau[row] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row])
    tableau[:, col] = 0.0
    tableau[row, col] = 1.0
    basis[row] = col


def _run_simplex(
    tableau: np.ndarray,
    basis: np.ndarray,
    allowed: np.ndarray,
    rule: str,
    max_iter: int,
) -> tuple[str, int]:
    m = len(basis)
    iterations = 0
    degenerate_streak = 0
    use_bland = rule == "bland"
    while iterations < max_iter:
        costs = tableau[-1, :-1]
        eligible = np.where(allowed & (costs < -PIVOT_TOL))[0]
        if eligible.size == 0:
            return "optimal", iterations
        if use_bland:
            col = int(eligible[0])
        else:
            col = int(eligible[np.argmin(costs[eligible])])

        ratios = np.full(m, np.inf)
        positive = tableau[:m, col] > PIVOT_TOL
        ratios[positive] = tableau[:m, -1][positive] / tableau[:m, col][positive]
        best = ratios.min()
        if not np.isfinite(best):
            return "unbounded", iterations
        # leaving variable: smallest ratio, ties by smallest basis index
        tied = np.where(ratios <= best + PIVOT_TOL)[0]
        row = int(tied[np.argmin(basis[tied])])

        if not use_bland:
            degenerate_streak = degenerate_streak + 1 if best <= PIVOT_TOL else 0
            if degenerate_streak > 4 * (m + tableau.shape[1]):
                use_bland = True  # permanent anti-cycling fallback
        _pivot(tableau, basis, row, col)
        iterations += 1
    return "stalled", iterations


def solve(
    c: np.ndarray,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    rule: str = "bland",
    max_iter: int | None = None,
) -> SimplexResult:
    """Two-phase simplex; returns the optimal basic feasible solution."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    slack_rows: list[int] = []
    if a_ub is not None and len(a_ub):
        a_ub = np.asarray(a_ub, dtype=float)
        for k in range(a_ub.shape[0]):
            rows.append(a_ub[k])
            rhs.append(float(b_ub[k]))
            slack_rows.append(len(rows) - 1)
    if a_eq is not None and len(a_eq):
        a_eq = np.asarray(a_eq, dtype=float)
        for k in range(a_eq.shape[0]):
            rows.append(a_eq[k])
            rhs.append(float(b_eq[k]))
    m = len(rows)
    if m == 0:
        if (c < -PIVOT_TOL).any():
            return SimplexResult("unbounded")
        return SimplexResult("optimal", np.zeros(n), 0.0)

    n_slack = len(slack_rows)
    a = np.zeros((m, n + n_slack))
    b = np.array(rhs)
    for r, row in enumerate(rows):
        a[r, :n] = row
    for s, r in enumerate(slack_rows):
        a[r, n + s] = 1.0
    negative = b < 0
    a[negative] *= -1.0
    b[negative] *= -1.0

    # slack columns with +1 coefficient form the initial basis; every other
    # row gets an artificial variable
    basis = np.full(m, -1, dtype=int)
    for s, r in enumerate(slack_rows):
        if a[r, n + s] > 0:
            basis[r] = n + s
    art_rows = [r for r in range(m) if basis[r] < 0]
    n_art = len(art_rows)
    total = n + n_slack + n_art

    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, : n + n_slack] = a
    tableau[:m, -1] = b
    for k, r in enumerate(art_rows):
        tableau[r, n + n_slack + k] = 1.0
        basis[r] = n + n_slack + k

    max_iter = max_iter or 200 * (m + total)

    if n_art:
        # phase 1: minimize the artificial sum
        tableau[-1, :] = 0.0
        tableau[-1, n + n_slack : total] = 1.0
        for r in art_rows:
            tableau[-1] -= tableau[r]
        allowed = np.ones(total, dtype=bool)
        status, it1 = _run_simplex(tableau, basis, allowed, rule, max_iter)
        if status != "optimal":
            return SimplexResult("stalled", iterations=it1)
        if -tableau[-1, -1] > FEAS_TOL:
            return SimplexResult("infeasible", iterations=it1)
        # drive remaining artificials out of the basis or drop their rows
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] < n + n_slack:
                continue
            pivot_candidates = np.where(np.abs(tableau[r, : n + n_slack]) > PIVOT_TOL)[0]
            if pivot_candidates.size:
                _pivot(tableau, basis, r, int(pivot_candidates[0]))
            else:
                keep[r] = False  # redundant constraint
        if not keep.all():
            tableau = np.vstack([tableau[:m][keep], tableau[-1:]])
            basis = basis[keep]
            m = len(basis)
    else:
        it1 = 0

    # phase 2: real objective over structural + slack columns
    tableau[-1, :] = 0.0
    tableau[-1, :n] = c
    for r in range(m):
        cb = tableau[-1, basis[r]]
        if cb != 0.0:
            tableau[-1] -= cb * tableau[r]
    allowed = np.zeros(total, dtype=bool)
    allowed[: n + n_slack] = True
    status, it2 = _run_simplex(tableau, basis, allowed, rule, max_iter)
    if status != "optimal":
        return SimplexResult(status, iterations=it1 + it2)

    x = np.zeros(total)
    x[basis] = tableau[:m, -1]
    return SimplexResult("optimal", x[:n], float(c @ x[:n]), it1 + it2)
