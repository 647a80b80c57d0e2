"""Exact minimization of the joint support energy.

The energy is encoded as a 0/1 integer program over an over-complete
representation: per object a one-hot supporter/support-type choice and a
one-hot class choice, plus pair variables chi linearizing the class-pair
costs of each candidate (object, visible supporter) edge.  Marginalization
constraints tie the chi mass to both endpoints' choices, so any solution
with integral one-hot variables prices exactly like the scalar energy.

The [0,1] relaxation is solved with the in-repo simplex and fractional
solutions are resolved by best-bound branch and bound on the one-hot
variables, which is exhaustive and therefore exact.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lp
from .config import EnergyWeights
from .energy import (
    SATURATION,
    SupportProblem,
    make_solution,
    neg_log,
    pairwise_class_cost,
    ground_class_cost,
    total_energy,
)
from .model import (
    GROUND_INDEX,
    GROUND_SELF,
    HIDDEN_SUPPORTER,
    ObjectAssignment,
    SUPPORT_BEHIND,
    SUPPORT_BELOW,
    SupportSolution,
)

INTEGRALITY_TOL = 1e-7
PRUNE_MARGIN = 1e-10


@dataclass(frozen=True)
class SupportOption:
    """One supporter column: (supporter, support_type), ground has type None."""

    supporter: int
    support_type: int | None

    @property
    def visible(self) -> bool:
        return self.supporter >= 0


def support_options(n_objects: int, i: int) -> list[SupportOption]:
    """Column layout per object: behind-from-everything, below-from-everything,
    then the ground column.  Self-support is excluded."""
    opts = []
    for stype in (SUPPORT_BEHIND, SUPPORT_BELOW):
        for j in range(n_objects):
            if j != i:
                opts.append(SupportOption(j, stype))
        opts.append(SupportOption(HIDDEN_SUPPORTER, stype))
    opts.append(SupportOption(GROUND_SELF, None))
    return opts


@dataclass
class IPModel:
    """Dense integer-program encoding of one scene's support energy."""

    problem: SupportProblem
    weights: EnergyWeights
    var_names: list[tuple] = field(default_factory=list)
    objective: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_eq: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    a_ub: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    b_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))
    support_vars: dict = field(default_factory=dict)   # (i, option idx) -> var
    class_vars: dict = field(default_factory=dict)     # (i, class) -> var
    options: list = field(default_factory=list)        # per object

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def branch_variables(self) -> list[int]:
        """One-hot variables, in deterministic order."""
        return sorted(self.support_vars.values()) + sorted(self.class_vars.values())


@dataclass
class LPSolution:
    status: str                     # optimal | infeasible | unbounded
    values: np.ndarray | None = None
    objective: float | None = None


def build_ip(problem: SupportProblem, weights: EnergyWeights) -> IPModel:
    """Assemble objective coefficients and marginalization constraints."""
    n = problem.n_objects
    v = problem.n_classes
    model = IPModel(problem, weights)
    if n == 0:
        model.objective = np.zeros(0)
        return model

    names = model.var_names
    p = problem.support_probs
    aw = weights

    coeffs: list[float] = []
    model.options = [support_options(n, i) for i in range(n)]
    for i in range(n):
        for k, opt in enumerate(model.options[i]):
            model.support_vars[(i, k)] = len(names)
            names.append(("sp", i, k))
            if opt.supporter == GROUND_SELF:
                coeffs.append(0.0)
            elif opt.supporter == HIDDEN_SUPPORTER:
                coeffs.append(neg_log(p[i, n, opt.support_type]) + aw.alpha_spc * aw.k_hidden)
            else:
                j = opt.supporter
                if opt.support_type == SUPPORT_BELOW:
                    gap = problem.heights_bottom[i] - problem.heights_top[j]
                    dist = min(float(gap * gap), SATURATION)
                else:
                    dist = min(float(problem.horizontal_gap[i, j]), SATURATION)
                coeffs.append(neg_log(p[i, j, opt.support_type]) + aw.alpha_dist * dist)

    for i in range(n):
        for lam in range(v):
            model.class_vars[(i, lam)] = len(names)
            names.append(("cls", i, lam))
            cost = neg_log(
                problem.class_probs[i, lam] * problem.class_given_scene[lam] * problem.scene_prob
            )
            if lam == GROUND_INDEX:
                cost += aw.alpha_class * ground_class_cost(problem, i)
                if not problem.is_lowest(i):
                    cost += aw.alpha_spc * SATURATION
            coeffs.append(min(cost, SATURATION))

    chi_vars: dict = {}
    for i in range(n):
        for k, opt in enumerate(model.options[i]):
            if not opt.visible:
                continue
            for lam in range(v):
                for ups in range(v):
                    chi_vars[(i, k, lam, ups)] = len(names)
                    names.append(("chi", i, k, lam, ups))
                    coeffs.append(
                        aw.alpha_class
                        * min(pairwise_class_cost(problem, i, opt.supporter, lam, ups), SATURATION)
                    )
    model.objective = np.array(coeffs)

    n_vars = len(names)
    eq_rows, eq_rhs = [], []
    ub_rows, ub_rhs = [], []

    def new_row():
        return np.zeros(n_vars)

    for i in range(n):  # one supporter per object
        row = new_row()
        for k in range(len(model.options[i])):
            row[model.support_vars[(i, k)]] = 1.0
        eq_rows.append(row)
        eq_rhs.append(1.0)
    for i in range(n):  # one class per object
        row = new_row()
        for lam in range(v):
            row[model.class_vars[(i, lam)]] = 1.0
        eq_rows.append(row)
        eq_rhs.append(1.0)
    for i in range(n):  # chi mass equals the edge indicator
        for k, opt in enumerate(model.options[i]):
            if not opt.visible:
                continue
            row = new_row()
            for lam in range(v):
                for ups in range(v):
                    row[chi_vars[(i, k, lam, ups)]] = 1.0
            row[model.support_vars[(i, k)]] = -1.0
            eq_rows.append(row)
            eq_rhs.append(0.0)
    for i in range(n):  # chi consistent with the supported object's class
        for lam in range(v):
            row = new_row()
            hit = False
            for k, opt in enumerate(model.options[i]):
                if not opt.visible:
                    continue
                hit = True
                for ups in range(v):
                    row[chi_vars[(i, k, lam, ups)]] = 1.0
            if not hit:
                continue
            row[model.class_vars[(i, lam)]] = -1.0
            ub_rows.append(row)
            ub_rhs.append(0.0)
    for i in range(n):  # chi consistent with the supporter's class
        for j in range(n):
            if j == i:
                continue
            for ups in range(v):
                row = new_row()
                for k, opt in enumerate(model.options[i]):
                    if opt.supporter != j:
                        continue
                    for lam in range(v):
                        row[chi_vars[(i, k, lam, ups)]] = 1.0
                row[model.class_vars[(j, ups)]] = -1.0
                ub_rows.append(row)
                ub_rhs.append(0.0)
    ground_col = len(model.options[0]) - 1
    for i in range(n):  # ground column active exactly for the ground class
        row = new_row()
        row[model.support_vars[(i, ground_col)]] = 1.0
        row[model.class_vars[(i, GROUND_INDEX)]] = -1.0
        eq_rows.append(row)
        eq_rhs.append(0.0)

    model.a_eq = np.array(eq_rows)
    model.b_eq = np.array(eq_rhs)
    model.a_ub = np.array(ub_rows)
    model.b_ub = np.array(ub_rhs)
    return model


def solve_lp(model: IPModel, fixed: dict[int, int] | None = None, rule: str = "bland") -> LPSolution:
    """Solve the [0,1] relaxation, optionally with some variables pinned.

    Unit upper bounds are implied by the one-hot equalities, so only
    nonnegativity is explicit.  Pinned columns are substituted out.
    """
    fixed = fixed or {}
    if model.n_vars == 0:
        return LPSolution("optimal", np.zeros(0), 0.0)
    keep = np.array([idx not in fixed for idx in range(model.n_vars)])
    base = np.zeros(model.n_vars)
    for idx, val in fixed.items():
        base[idx] = val

    b_eq = model.b_eq - model.a_eq @ base if len(model.b_eq) else model.b_eq
    b_ub = model.b_ub - model.a_ub @ base if len(model.b_ub) else model.b_ub
    const = float(model.objective @ base)

    result = lp.solve(
        model.objective[keep],
        a_ub=model.a_ub[:, keep] if len(model.b_ub) else None,
        b_ub=b_ub if len(model.b_ub) else None,
        a_eq=model.a_eq[:, keep] if len(model.b_eq) else None,
        b_eq=b_eq if len(model.b_eq) else None,
        rule=rule,
    )
    if result.status != "optimal":
        status = result.status if result.status in ("infeasible", "unbounded") else "infeasible"
        return LPSolution(status)
    values = base.copy()
    values[keep] = np.clip(result.x, 0.0, 1.0)
    return LPSolution("optimal", values, result.objective + const)


def _propagate(model: IPModel, fixed: dict[int, int]) -> dict[int, int] | None:
    """Close ``fixed`` under the one-hot and ground-tie equalities.
    Returns None on contradiction."""
    fixed = dict(fixed)
    groups = []
    n = model.problem.n_objects
    for i in range(n):
        groups.append([model.support_vars[(i, k)] for k in range(len(model.options[i]))])
        groups.append([model.class_vars[(i, lam)] for lam in range(model.problem.n_classes)])
    ground_col = len(model.options[0]) - 1 if n else 0
    ties = [
        (model.support_vars[(i, ground_col)], model.class_vars[(i, GROUND_INDEX)]) for i in range(n)
    ]
    changed = True
    while changed:
        changed = False
        for a, b in ties:
            for x, y in ((a, b), (b, a)):
                if x in fixed and fixed.get(y) != fixed[x]:
                    if y in fixed:
                        return None
                    fixed[y] = fixed[x]
                    changed = True
        for group in groups:
            ones = [g for g in group if fixed.get(g) == 1]
            if len(ones) > 1:
                return None
            if len(ones) == 1:
                for g in group:
                    if g not in fixed:
                        fixed[g] = 0
                        changed = True
                    elif fixed[g] == 1 and g != ones[0]:
                        return None
            else:
                free = [g for g in group if g not in fixed]
                if not free:
                    return None
                if len(free) == 1:
                    fixed[free[0]] = 1
                    changed = True
    return fixed


def _decode(model: IPModel, values: np.ndarray) -> list[ObjectAssignment] | None:
    """Integral LP values -> assignment; None when any one-hot is fractional."""
    problem = model.problem
    out = []
    for i in range(problem.n_objects):
        opt_choice = None
        for k, opt in enumerate(model.options[i]):
            val = values[model.support_vars[(i, k)]]
            if val > 1.0 - INTEGRALITY_TOL:
                opt_choice = opt
                break
            if val > INTEGRALITY_TOL:
                return None
        cls_choice = None
        for lam in range(problem.n_classes):
            val = values[model.class_vars[(i, lam)]]
            if val > 1.0 - INTEGRALITY_TOL:
                cls_choice = lam
                break
            if val > INTEGRALITY_TOL:
                return None
        if opt_choice is None or cls_choice is None:
            return None
        out.append(
            ObjectAssignment(
                detection_id=problem.detection_ids[i],
                class_index=cls_choice,
                supporter=opt_choice.supporter,
                support_type=opt_choice.support_type,
            )
        )
    return out


def _all_hidden_solution(problem: SupportProblem, weights: EnergyWeights, note: str) -> SupportSolution:
    assignment = []
    scores = problem.class_probs * problem.class_given_scene
    for i in range(problem.n_objects):
        # hidden support pairs with a non-ground class in the model
        ranked = np.argsort(-scores[i], kind="stable")
        best_cls = int(next(c for c in ranked if c != GROUND_INDEX))
        assignment.append(
            ObjectAssignment(
                detection_id=problem.detection_ids[i],
                class_index=best_cls,
                supporter=HIDDEN_SUPPORTER,
                support_type=SUPPORT_BELOW,
            )
        )
    return make_solution(problem, assignment, weights, warnings=(note,))


@dataclass
class SolveStats:
    nodes: int = 0
    lp_iterations: int = 0
    root_bound: float = float("nan")


def solve_support(
    problem: SupportProblem,
    weights: EnergyWeights,
    rule: str = "fast",
    stats: SolveStats | None = None,
) -> SupportSolution:
    """Globally optimal joint assignment via LP relaxation + branch and bound.

    Branches on the most fractional one-hot variable; nodes are explored in
    best-bound order with creation-index tie-breaks, so results are
    deterministic for identical inputs.
    """
    if problem.n_objects == 0:
        return make_solution(problem, [], weights)
    model = build_ip(problem, weights)
    branch_vars = model.branch_variables()

    root = solve_lp(model, None, rule=rule)
    if root.status != "optimal":
        return _all_hidden_solution(problem, weights, f"root relaxation {root.status}")
    if stats is not None:
        stats.root_bound = root.objective

    best_solution: SupportSolution | None = None
    best_energy = np.inf
    counter = itertools.count()
    heap: list[tuple[float, int, dict, LPSolution]] = [(root.objective, next(counter), {}, root)]

    while heap:
        bound, _, fixed, lpres = heapq.heappop(heap)
        if bound >= best_energy - PRUNE_MARGIN:
            break  # best-bound order: nothing better remains
        if stats is not None:
            stats.nodes += 1

        assignment = _decode(model, lpres.values)
        if assignment is not None:
            energy, _, _ = total_energy(problem, assignment, weights)
            if energy < best_energy:
                best_energy = energy
                best_solution = make_solution(problem, assignment, weights)
            continue

        # most fractional one-hot variable, ties to the lowest index; the
        # threshold sits below the decoder's so every undecodable node branches
        frac_var = None
        frac_best = 0.5 * INTEGRALITY_TOL
        for var in branch_vars:
            f = min(lpres.values[var], 1.0 - lpres.values[var])
            if f > frac_best:
                frac_best = f
                frac_var = var
        if frac_var is None:
            continue  # fractional only in chi space; cannot happen with consistent one-hots

        for value in (1, 0):
            child_fixed = _propagate(model, {**fixed, frac_var: value})
            if child_fixed is None:
                continue
            child = solve_lp(model, child_fixed, rule=rule)
            if child.status != "optimal":
                continue
            if child.objective < best_energy - PRUNE_MARGIN:
                heapq.heappush(heap, (child.objective, next(counter), child_fixed, child))

    if best_solution is None:
        return _all_hidden_solution(problem, weights, "no integral solution found")
    if best_solution.energy >= SATURATION:
        return _all_hidden_solution(problem, weights, "no finite-energy assignment")
    return best_solution


def exhaustive_minimize(problem: SupportProblem, weights: EnergyWeights, max_n: int = 6) -> SupportSolution:
    """Ground-truth minimizer by direct enumeration (test oracle).

    Enumerates every class tuple; given all classes, each object's best
    supporter choice is independent, so the per-object minimum over
    supporter options is taken inside the loop.  Intended for N <= max_n.
    """
    n = problem.n_objects
    if n == 0:
        return make_solution(problem, [], weights)
    if n > max_n:
        raise ValueError(f"exhaustive search limited to N <= {max_n}, got {n}")
    v = problem.n_classes
    p = problem.support_probs

    ec = np.empty((n, v))
    for i in range(n):
        for lam in range(v):
            ec[i, lam] = neg_log(
                problem.class_probs[i, lam] * problem.class_given_scene[lam] * problem.scene_prob
            )

    # supporter-independent part of each visible option, minimized over type
    vis_base = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            gap = problem.heights_bottom[i] - problem.heights_top[j]
            below = neg_log(p[i, j, SUPPORT_BELOW]) + weights.alpha_dist * min(float(gap * gap), SATURATION)
            behind = neg_log(p[i, j, SUPPORT_BEHIND]) + weights.alpha_dist * min(
                float(problem.horizontal_gap[i, j]), SATURATION
            )
            vis_base[i, j] = min(below, behind)
    hid_cost = np.array(
        [
            min(
                neg_log(p[i, n, SUPPORT_BELOW]),
                neg_log(p[i, n, SUPPORT_BEHIND]),
            )
            + weights.alpha_spc * weights.k_hidden
            for i in range(n)
        ]
    )
    pair = np.empty((n, n, v, v))
    for i in range(n):
        for j in range(n):
            if j == i:
                pair[i, j] = SATURATION
                continue
            for lam in range(v):
                for ups in range(v):
                    pair[i, j, lam, ups] = weights.alpha_class * pairwise_class_cost(
                        problem, i, j, lam, ups
                    )
    ground_total = np.array(
        [
            ec[i, GROUND_INDEX]
            + weights.alpha_class * ground_class_cost(problem, i)
            + (0.0 if problem.is_lowest(i) else weights.alpha_spc * SATURATION)
            for i in range(n)
        ]
    )

    tuples = np.array(list(itertools.product(range(v), repeat=n)), dtype=int)
    totals = np.zeros(len(tuples))
    for i in range(n):
        lam = tuples[:, i]
        options = [np.full(len(tuples), hid_cost[i])]
        for j in range(n):
            if j == i:
                continue
            options.append(vis_base[i, j] + pair[i, j, lam, tuples[:, j]])
        support_min = np.minimum.reduce(options)
        cost_i = np.where(lam == GROUND_INDEX, ground_total[i], ec[i, lam] + support_min)
        totals += cost_i

    best_idx = int(np.argmin(totals))
    best_classes = tuples[best_idx]

    assignment = []
    for i in range(n):
        lam = int(best_classes[i])
        if lam == GROUND_INDEX:
            assignment.append(
                ObjectAssignment(problem.detection_ids[i], lam, GROUND_SELF, None)
            )
            continue
        best_opt = None
        best_cost = np.inf
        for opt in support_options(n, i):
            if opt.supporter == GROUND_SELF:
                continue
            if opt.supporter == HIDDEN_SUPPORTER:
                cost = neg_log(p[i, n, opt.support_type]) + weights.alpha_spc * weights.k_hidden
            else:
                j = opt.supporter
                if opt.support_type == SUPPORT_BELOW:
                    gap = problem.heights_bottom[i] - problem.heights_top[j]
                    dist = min(float(gap * gap), SATURATION)
                else:
                    dist = min(float(problem.horizontal_gap[i, j]), SATURATION)
                cost = (
                    neg_log(p[i, j, opt.support_type])
                    + weights.alpha_dist * dist
                    + weights.alpha_class
                    * pairwise_class_cost(problem, i, j, lam, int(best_classes[j]))
                )
            if cost < best_cost - 1e-15:
                best_cost = cost
                best_opt = opt
        assignment.append(
            ObjectAssignment(problem.detection_ids[i], lam, best_opt.supporter, best_opt.support_type)
        )
    return make_solution(problem, assignment, weights)


def dump_lp(model: IPModel, path: str | Path):
    """Write the relaxation in LP text format for external cross-checking."""

    def var_name(idx: int) -> str:
        parts = model.var_names[idx]
        return "_".join(str(p) for p in parts).replace("-", "m")

    lines = ["\\ support-inference relaxation", "Minimize", " obj:"]
    terms = [
        f" {'+' if cst >= 0 else '-'} {abs(cst):.12g} {var_name(i)}"
        for i, cst in enumerate(model.objective)
    ]
    lines[-1] += "".join(terms)
    lines.append("Subject To")

    def rows(a, b, op, prefix):
        out = []
        for r in range(len(b)):
            body = "".join(
                f" {'+' if coef > 0 else '-'} {abs(coef):.12g} {var_name(j)}"
                for j, coef in enumerate(a[r])
                if coef != 0.0
            )
            out.append(f" {prefix}{r}:{body} {op} {b[r]:.12g}")
        return out

    lines += rows(model.a_eq, model.b_eq, "=", "e")
    lines += rows(model.a_ub, model.b_ub, "<=", "u")
    lines.append("Bounds")
    for i in range(model.n_vars):
        lines.append(f" 0 <= {var_name(i)} <= 1")
    lines.append("End")
    Path(path).write_text("\n".join(lines) + "\n")
