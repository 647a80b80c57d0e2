"""Quantitative comparison of a hypothesis graph against ground truth.

Three measures, all zero for identical graphs:

* Cheeger: both graphs' conductance bracket [l, u] from the second largest
  random-walk eigenvalue, compared by |(u-l) - (u'-l')|.
* Spectral: Frobenius distance between the rank-one projectors of the two
  second eigenvectors over a shared vertex index, normalized by the square
  root of the ground-truth vertex count.
* Naive: XOR-over-OR of the class-level support matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph_build import graph_classes, graph_to_matrix
from .model import HIDDEN_LABEL, SceneGraph, SimilarityReport

EIGEN_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class UndirectedGraph:
    """Symmetric 0/1 adjacency over canonically keyed vertices."""

    keys: tuple[tuple[str, int], ...]   # (class label, instance ordinal)
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.shape != (len(self.keys), len(self.keys)):
            raise ValueError("adjacency must be square over the vertex keys")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.diagonal(a).any():
            raise ValueError("self-loops are not allowed")
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return len(self.keys)

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def _vertex_sort_key(vertex):
    if vertex.bbox is not None:
        u = 0.5 * (vertex.bbox[0] + vertex.bbox[2])
        w = 0.5 * (vertex.bbox[1] + vertex.bbox[3])
    else:
        u = w = float("inf")
    z = 0.5 * (vertex.z_range[0] + vertex.z_range[1]) if vertex.z_range else float("inf")
    return (u, w, z, vertex.vertex_id)


def relax_undirected(graph: SceneGraph) -> UndirectedGraph:
    """Undirected support structure of ``graph``.

    Vertices are keyed (label, ordinal) with ordinals assigned per class by
    spatial order, so two graphs over the same scene align by key.  Support
    edges and root adjacencies are symmetrized; a hidden vertex that
    supports nothing is dropped.
    """
    hidden_id = graph.hidden.vertex_id
    hidden_used = any(parent == hidden_id for _, parent in graph.support_edges)

    vertices = [v for v in graph.vertices if v.kind != "hidden" or hidden_used]
    by_label: dict[str, list] = {}
    for v in vertices:
        label = graph.scene_type if v.kind == "root" else v.label
        by_label.setdefault(label, []).append(v)
    key_of: dict[int, tuple[str, int]] = {}
    for label, members in by_label.items():
        members.sort(key=_vertex_sort_key)
        for ordinal, v in enumerate(members):
            key_of[v.vertex_id] = (label, ordinal)

    keys = tuple(sorted(key_of.values()))
    index = {key: k for k, key in enumerate(keys)}
    adj = np.zeros((len(keys), len(keys)))

    def connect(a: int, b: int):
        ka, kb = index[key_of[a]], index[key_of[b]]
        if ka != kb:
            adj[ka, kb] = adj[kb, ka] = 1.0

    root_id = graph.root.vertex_id
    for vid in graph.root_adjacent_ids():
        if vid in key_of:
            connect(root_id, vid)
    for child, parent in graph.support_edges:
        connect(child, parent)
    return UndirectedGraph(keys, adj)


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors-as-columns) in descending eigenvalue
    order with deterministic handling of ties (stable sort, fixed rotation
    order).
    """
    a = np.array(matrix, dtype=float)
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(max(0.0, (a**2).sum() - (np.diagonal(a) ** 2).sum()))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < tol / max(1, n):
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / a[p, q]
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    order = np.argsort(-np.diagonal(a), kind="stable")
    return np.diagonal(a)[order].copy(), v[:, order].copy()


def lambda2_randomwalk(g: UndirectedGraph) -> tuple[float, np.ndarray]:
    """Second largest eigenvalue of D^-1 A and its eigenvector.

    Computed through the symmetric form D^-1/2 A D^-1/2, whose spectrum
    coincides; the eigenvector maps back through D^-1/2, unit-normalized,
    sign fixed by making the largest-magnitude entry positive.
    """
    if g.n < 2:
        raise ValueError("need at least two vertices for a second eigenvalue")
    d = g.degrees
    if (d == 0).any():
        raise ValueError("graph has isolated vertices; analyze a component instead")
    d_isqrt = 1.0 / np.sqrt(d)
    sym = g.adjacency * np.outer(d_isqrt, d_isqrt)
    eigvals, eigvecs = jacobi_eigh(sym)
    lam2 = float(eigvals[1])
    u2 = d_isqrt * eigvecs[:, 1]
    u2 = u2 / np.linalg.norm(u2)
    peak = int(np.argmax(np.abs(u2)))
    if u2[peak] < 0:
        u2 = -u2
    return lam2, u2


def connected_components(g: UndirectedGraph) -> list[list[int]]:
    seen: set[int] = set()
    components = []
    for start in range(g.n):
        if start in seen:
            continue
        stack = [start]
        comp = []
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            comp.append(node)
            stack.extend(np.nonzero(g.adjacency[node])[0].tolist())
        components.append(sorted(comp))
    return components


def _largest_component(g: UndirectedGraph) -> tuple[UndirectedGraph, bool]:
    comps = connected_components(g)
    if len(comps) == 1:
        return g, False
    comps.sort(key=lambda c: (-len(c), c))
    keep = comps[0]
    sub = g.adjacency[np.ix_(keep, keep)]
    return UndirectedGraph(tuple(g.keys[k] for k in keep), sub), True


def cheeger_bounds(g: UndirectedGraph) -> tuple[float, float, bool]:
    """(lower, upper, used_largest_component): (1 - lam2)/2 and sqrt(2 - 2 lam2)."""
    g, flagged = _largest_component(g)
    lam2, _ = lambda2_randomwalk(g)
    lower = 0.5 * (1.0 - lam2)
    upper = float(np.sqrt(max(0.0, 2.0 - 2.0 * lam2)))
    return lower, upper, flagged


def cheeger_distance(hyp: UndirectedGraph, gt: UndirectedGraph) -> tuple[float, tuple[str, ...]]:
    """|gap(hyp) - gap(gt)| where gap = upper - lower Cheeger bound."""
    flags = []
    l_h, u_h, f_h = cheeger_bounds(hyp)
    l_g, u_g, f_g = cheeger_bounds(gt)
    if f_h:
        flags.append("hypothesis-disconnected")
    if f_g:
        flags.append("ground-truth-disconnected")
    return abs((u_h - l_h) - (u_g - l_g)), tuple(flags)


def _expanded_u2(g: UndirectedGraph, index: dict) -> tuple[np.ndarray, bool]:
    comp, _ = _largest_component(g)
    lam2, u2 = lambda2_randomwalk(comp)
    # degeneracy makes the eigenvector basis-dependent; flag it
    d = comp.degrees
    d_isqrt = 1.0 / np.sqrt(d)
    sym = comp.adjacency * np.outer(d_isqrt, d_isqrt)
    eigvals, _ = jacobi_eigh(sym)
    degenerate = len(eigvals) > 2 and abs(eigvals[1] - eigvals[2]) < EIGEN_DEGENERACY_TOL
    full = np.zeros(len(index))
    for k, key in enumerate(comp.keys):
        full[index[key]] = u2[k]
    return full, degenerate


def spectral_distance(hyp: UndirectedGraph, gt: UndirectedGraph) -> tuple[float, tuple[str, ...]]:
    """Frobenius distance of the u2 projectors over the union vertex index,
    normalized by sqrt(|V| of the ground truth).  Sign-invariant."""
    union = sorted(set(hyp.keys) | set(gt.keys))
    index = {key: k for k, key in enumerate(union)}
    flags = []
    u_h, deg_h = _expanded_u2(hyp, index)
    u_g, deg_g = _expanded_u2(gt, index)
    if deg_h or deg_g:
        flags.append("degenerate-eigenvalue")
    diff = np.outer(u_h, u_h) - np.outer(u_g, u_g)
    return float(np.linalg.norm(diff) / np.sqrt(gt.n)), tuple(flags)


def naive_distance(hyp_matrix: np.ndarray, gt_matrix: np.ndarray) -> float:
    """XOR count over OR count of two binary matrices; 0 when both empty."""
    a = np.asarray(hyp_matrix, dtype=bool)
    b = np.asarray(gt_matrix, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"matrix shapes differ: {a.shape} vs {b.shape}")
    union = int((a | b).sum())
    if union == 0:
        return 0.0
    return float((a ^ b).sum() / union)


def compare_graphs(hyp: SceneGraph, gt: SceneGraph) -> SimilarityReport:
    """All three measures for one hypothesis/ground-truth pair."""
    hyp_u = relax_undirected(hyp)
    gt_u = relax_undirected(gt)
    cheeger, flags_c = cheeger_distance(hyp_u, gt_u)
    spectral, flags_s = spectral_distance(hyp_u, gt_u)
    classes = sorted(set(graph_classes(hyp)) | set(graph_classes(gt)))
    naive = naive_distance(graph_to_matrix(hyp, classes), graph_to_matrix(gt, classes))
    return SimilarityReport(cheeger, spectral, naive, flags=tuple([*flags_c, *flags_s]))


@dataclass(frozen=True)
class BatchReport:
    """Per-measure mean and population variance over many scene pairs."""

    reports: tuple[SimilarityReport, ...]
    means: dict[str, float] = field(default_factory=dict)
    variances: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pairs": len(self.reports),
            "means": dict(self.means),
            "variances": dict(self.variances),
            "per_pair": [
                {
                    "cheeger": r.cheeger_distance,
                    "spectral": r.spectral_distance,
                    "naive": r.naive_distance,
                    "flags": list(r.flags),
                }
                for r in self.reports
            ],
        }

    def format_table(self) -> str:
        rows = [
            ("Measures", "Cheeger", "Spectral", "Naive"),
            (
                "Mean",
                f"{self.means['cheeger']:.4f}",
                f"{self.means['spectral']:.4f}",
                f"{self.means['naive']:.4f}",
            ),
            (
                "Variance",
                f"{self.variances['cheeger']:.4f}",
                f"{self.variances['spectral']:.4f}",
                f"{self.variances['naive']:.4f}",
            ),
        ]
        widths = [max(len(r[k]) for r in rows) for k in range(4)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows]
        return "\n".join(lines)


def batch_report(pairs: list[tuple[SceneGraph, SceneGraph]]) -> BatchReport:
    """Evaluate (hypothesis, ground truth) pairs and aggregate the measures."""
    if not pairs:
        raise ValueError("batch evaluation needs at least one pair")
    reports = tuple(compare_graphs(h, g) for h, g in pairs)
    values = {
        "cheeger": np.array([r.cheeger_distance for r in reports]),
        "spectral": np.array([r.spectral_distance for r in reports]),
        "naive": np.array([r.naive_distance for r in reports]),
    }
    return BatchReport(
        reports=reports,
        means={k: float(v.mean()) for k, v in values.items()},
        variances={k: float(v.var()) for k, v in values.items()},
    )
