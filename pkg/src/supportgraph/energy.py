"""Joint energy of a complete (supporter, support type, class) assignment.

The total is

    E = E_support + E_class
        + alpha_class * sum C_classpair
        + alpha_dist  * sum C_distance
        + alpha_spc   * sum C_structural

evaluated object by object.  Hard violations saturate at SATURATION
instead of infinity so that optimizer coefficients stay finite; a solution
containing any saturated term is flagged.  Natural log throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EnergyWeights
from .model import (
    EnergyBreakdown,
    GROUND_INDEX,
    GROUND_SELF,
    HIDDEN_SUPPORTER,
    ObjectAssignment,
    SUPPORT_BELOW,
    SUPPORT_BEHIND,
    SupportSolution,
)

SATURATION = 1e12


def neg_log(p: float) -> float:
    """-log p, saturated for p <= 0 and capped at SATURATION."""
    if p <= 0.0:
        return SATURATION
    return min(-float(np.log(p)), SATURATION)


@dataclass(frozen=True)
class SupportProblem:
    """Everything the energy needs, preprocessed into dense arrays.

    ``support_probs`` has shape (N, N+1, 3); column N is the hidden
    supporter and the last axis is (below, behind, none).
    ``horizontal_gap[i, j]`` is the minimum floor-plane distance between
    the two regions' points.  ``support_prior[u, c]`` is the prior of
    class u supporting class c.
    """

    class_names: tuple[str, ...]
    heights_bottom: np.ndarray    # (N,)
    heights_top: np.ndarray       # (N,)
    horizontal_gap: np.ndarray    # (N, N)
    support_probs: np.ndarray     # (N, N+1, 3)
    class_probs: np.ndarray       # (N, V) detector class probabilities
    class_given_scene: np.ndarray # (V,) prior of each class in the chosen scene
    scene_prob: float             # classifier probability of the chosen scene
    support_prior: np.ndarray     # (V, V)
    detection_ids: tuple[int, ...] = ()

    @property
    def n_objects(self) -> int:
        return len(self.heights_bottom)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def __post_init__(self):
        n = len(self.heights_bottom)
        v = len(self.class_names)
        if self.support_probs.shape != (n, n + 1, 3):
            raise ValueError(f"support_probs shape {self.support_probs.shape} != ({n}, {n + 1}, 3)")
        if self.class_probs.shape != (n, v):
            raise ValueError(f"class_probs shape {self.class_probs.shape} != ({n}, {v})")
        if self.support_prior.shape != (v, v):
            raise ValueError(f"support_prior shape {self.support_prior.shape} != ({v}, {v})")
        if not self.detection_ids:
            object.__setattr__(self, "detection_ids", tuple(range(n)))

    def is_lowest(self, i: int) -> bool:
        """True when no other object reaches lower than object i."""
        others = np.delete(self.heights_bottom, i)
        return not (others < self.heights_bottom[i]).any()

    def is_strictly_lowest(self, i: int) -> bool:
        """True when every other object's bottom is strictly above object i's."""
        others = np.delete(self.heights_bottom, i)
        return bool((others > self.heights_bottom[i]).all())


def e_support(problem: SupportProblem, assignment: list[ObjectAssignment]) -> float:
    """-sum log of the support-classifier probability of each chosen pair;
    the self-supported ground contributes nothing."""
    total = 0.0
    for i, a in enumerate(assignment):
        if a.supporter == GROUND_SELF:
            continue
        j = problem.n_objects if a.supporter == HIDDEN_SUPPORTER else a.supporter
        total += neg_log(problem.support_probs[i, j, a.support_type])
    return total


def e_class(problem: SupportProblem, assignment: list[ObjectAssignment]) -> float:
    """-sum log of detector score * scene co-occurrence prior * scene score."""
    total = 0.0
    for i, a in enumerate(assignment):
        total += neg_log(
            problem.class_probs[i, a.class_index]
            * problem.class_given_scene[a.class_index]
            * problem.scene_prob
        )
    return total


def pairwise_class_cost(problem: SupportProblem, i: int, j: int, ci: int, cj: int) -> float:
    """Class-pair compatibility of object i (class ci) supported by visible
    object j (class cj): -log prior(cj supports ci), valid only when j's
    lowest point does not exceed i's highest; saturated otherwise."""
    if ci == GROUND_INDEX:
        return SATURATION
    if problem.heights_bottom[j] <= problem.heights_top[i]:
        return neg_log(problem.support_prior[cj, ci])
    return SATURATION


def ground_class_cost(problem: SupportProblem, i: int) -> float:
    """Class-pair term for object i declared the self-supported ground:
    -log detector ground score, valid only when strictly lowest."""
    if problem.is_strictly_lowest(i):
        return neg_log(problem.class_probs[i, GROUND_INDEX])
    return SATURATION


def c_class(problem: SupportProblem, i: int, a: ObjectAssignment, supporter_class: int | None = None) -> float:
    """Class-pair cost of one object's assignment.

    Hidden supporters carry no class-pair cost (there is no visible
    geometry to check them against).
    """
    if a.supporter == HIDDEN_SUPPORTER:
        return 0.0
    if a.supporter == GROUND_SELF:
        return ground_class_cost(problem, i) if a.class_index == GROUND_INDEX else SATURATION
    return pairwise_class_cost(problem, i, a.supporter, a.class_index, supporter_class)


def c_dist(problem: SupportProblem, i: int, a: ObjectAssignment) -> float:
    """Adjacency penalty: squared vertical gap for from-below support,
    minimum horizontal distance for from-behind, zero for hidden/ground."""
    if a.supporter in (GROUND_SELF, HIDDEN_SUPPORTER):
        return 0.0
    s = a.supporter
    if a.support_type == SUPPORT_BELOW:
        gap = problem.heights_bottom[i] - problem.heights_top[s]
        return min(float(gap * gap), SATURATION)
    return min(float(problem.horizontal_gap[i, s]), SATURATION)


def c_structural(problem: SupportProblem, i: int, a: ObjectAssignment, weights: EnergyWeights) -> float:
    """Everything-must-be-supported constraint.

    Saturates when a non-ground object claims self-support or a claimed
    ground is not the lowest object; hidden support costs k_hidden.
    """
    if a.supporter == GROUND_SELF and a.class_index != GROUND_INDEX:
        return SATURATION
    if a.class_index == GROUND_INDEX and not problem.is_lowest(i):
        return SATURATION
    if a.class_index != GROUND_INDEX and a.supporter == HIDDEN_SUPPORTER:
        return weights.k_hidden
    return 0.0


def total_energy(
    problem: SupportProblem,
    assignment: list[ObjectAssignment],
    weights: EnergyWeights,
) -> tuple[float, EnergyBreakdown, bool]:
    """Total energy, weighted per-term breakdown, and a saturation flag."""
    if len(assignment) != problem.n_objects:
        raise ValueError(f"assignment covers {len(assignment)} of {problem.n_objects} objects")
    sat = False

    sp = e_support(problem, assignment)
    cls = e_class(problem, assignment)

    cc = 0.0
    for i, a in enumerate(assignment):
        sup_cls = assignment[a.supporter].class_index if a.supporter >= 0 else None
        term = c_class(problem, i, a, sup_cls)
        cc += term
        sat = sat or term >= SATURATION

    cd = sum(c_dist(problem, i, a) for i, a in enumerate(assignment))
    cs = 0.0
    for i, a in enumerate(assignment):
        term = c_structural(problem, i, a, weights)
        cs += term
        sat = sat or term >= SATURATION
    sat = sat or sp >= SATURATION or cls >= SATURATION

    breakdown = EnergyBreakdown(
        support=sp,
        classification=cls,
        class_pair=weights.alpha_class * cc,
        distance=weights.alpha_dist * cd,
        structural=weights.alpha_spc * cs,
    )
    return breakdown.total, breakdown, sat


def make_solution(
    problem: SupportProblem,
    assignment: list[ObjectAssignment],
    weights: EnergyWeights,
    warnings: tuple[str, ...] = (),
) -> SupportSolution:
    total, breakdown, sat = total_energy(problem, assignment, weights)
    return SupportSolution(
        assignments=tuple(assignment),
        energy=total,
        breakdown=breakdown,
        saturated=sat,
        warnings=warnings,
    )
