"""Shared fixtures and random-instance generators for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from supportgraph.energy import SupportProblem
from supportgraph.model import GraphVertex, SceneGraph

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fig5_scene() -> Path:
    return FIXTURES / "scenes" / "fig5.json"


@pytest.fixture
def desk_scene() -> Path:
    return FIXTURES / "scenes" / "desk.json"


@pytest.fixture
def demo_priors() -> Path:
    return FIXTURES / "priors" / "demo_priors.json"


@pytest.fixture
def kitchen_gt() -> Path:
    return FIXTURES / "graphs" / "kitchen_gt.json"


@pytest.fixture
def kitchen_err() -> Path:
    return FIXTURES / "graphs" / "kitchen_err.json"


def random_support_problem(
    rng: np.random.Generator,
    n: int,
    n_classes: int,
    quantize: bool = False,
) -> SupportProblem:
    """A random but well-formed energy instance.

    ``quantize`` rounds the probabilities coarsely, which produces many
    exact energy ties and therefore fractional LP relaxations.
    """
    hb = rng.uniform(0.0, 2.0, n)
    ht = hb + rng.uniform(0.1, 1.0, n)
    gap = rng.uniform(0.0, 1.5, (n, n))
    gap = 0.5 * (gap + gap.T)
    np.fill_diagonal(gap, 0.0)
    p = rng.uniform(0.05, 1.0, (n, n + 1, 3))
    cp = rng.uniform(0.05, 1.0, (n, n_classes))
    cgs = rng.uniform(0.1, 1.0, n_classes)
    spr = rng.uniform(0.05, 1.0, (n_classes, n_classes))
    if quantize:
        p = np.round(p * 4) / 4 + 0.05
        cp = np.round(cp * 2) / 2 + 0.25
        cgs = np.round(cgs * 2) / 2 + 0.25
        spr = np.round(spr * 2) / 2 + 0.25
    p /= p.sum(axis=2, keepdims=True)
    cp /= cp.sum(axis=1, keepdims=True)
    return SupportProblem(
        class_names=tuple(["ground", "wall", "ceiling"][:n_classes])
        + tuple(f"class{k}" for k in range(max(0, n_classes - 3))),
        heights_bottom=hb,
        heights_top=ht,
        horizontal_gap=gap,
        support_probs=p,
        class_probs=cp,
        class_given_scene=cgs,
        scene_prob=float(rng.uniform(0.3, 1.0)),
        support_prior=spr,
    )


RANDOM_CLASSES = ("ground", "wall", "ceiling", "table", "chair", "lamp", "box", "books")


def random_scene_graph(rng: np.random.Generator, scene_id: str = "random") -> SceneGraph:
    """A random valid layered graph: forest support structure, mirrored
    position edges, occasional attributes and positions."""
    n_objects = int(rng.integers(0, 7))
    vertices = [
        GraphVertex(0, "root", str(rng.choice(["kitchen", "bedroom", "office"]))),
        GraphVertex(1, "hidden", "hidden"),
    ]
    support = set()
    structural_or_hidden = [1]
    colors = ("red", "green", "blue", "brown")
    for k in range(n_objects):
        vid = 2 + k
        label = str(rng.choice(RANDOM_CLASSES))
        bbox = None
        z_range = None
        if rng.random() < 0.7:
            u0, v0 = rng.uniform(0, 10, 2)
            bbox = (float(u0), float(v0), float(u0 + rng.uniform(1, 5)), float(v0 + rng.uniform(1, 5)))
        if rng.random() < 0.7:
            z0 = float(rng.uniform(0, 3))
            z_range = (z0, z0 + float(rng.uniform(0.1, 1.0)))
        attrs = tuple(sorted(rng.choice(colors, size=int(rng.integers(0, 3)), replace=False)))
        vertices.append(GraphVertex(vid, "object", label, bbox, z_range, attrs))
        if label in ("ground", "wall", "ceiling"):
            structural_or_hidden.append(vid)
        else:
            parent = int(rng.choice(structural_or_hidden + [v for v in range(2, vid)]))
            support.add((vid, parent))

    # drop support parents that would create a cycle (parents are always
    # lower ids, so the structure is already a forest)
    position = set()
    object_ids = [v.vertex_id for v in vertices[2:]]
    mirror = {"above": "under", "under": "above", "front": "behind", "behind": "front",
              "left": "right", "right": "left"}
    for _ in range(int(rng.integers(0, 4))):
        if len(object_ids) < 2:
            break
        i, j = rng.choice(object_ids, size=2, replace=False)
        rel = str(rng.choice(list(mirror)))
        position.add((int(i), int(j), rel))
        position.add((int(j), int(i), mirror[rel]))

    return SceneGraph(
        scene_id=scene_id,
        scene_type=vertices[0].label,
        vertices=tuple(vertices),
        support_edges=frozenset(support),
        position_edges=frozenset(position),
    )


def random_connected_graph(rng: np.random.Generator, n: int) -> np.ndarray:
    """Symmetric adjacency of a random connected graph on n vertices."""
    adj = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = order[k], order[int(rng.integers(0, k))]
        adj[a, b] = adj[b, a] = 1.0
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        a, b = rng.integers(0, n, 2)
        if a != b:
            adj[a, b] = adj[b, a] = 1.0
    return adj
