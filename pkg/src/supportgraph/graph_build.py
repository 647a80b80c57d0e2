"""Layered scene-graph construction from a support solution.

Layout: one root vertex carrying the scene type; structural objects
(ground, wall, ceiling) and the hidden vertex hang directly under the
root; every other object hangs under its inferred supporter.  Objects the
breadth-first pass never reaches (supporters caught in a cycle, or chains
into one) are re-assigned to the hidden vertex.
"""

from __future__ import annotations

import numpy as np

from . import geometry
from .config import EngineConfig
from .model import (
    GROUND,
    GROUND_SELF,
    HIDDEN_LABEL,
    HIDDEN_SUPPORTER,
    MIRROR_RELATION,
    CEILING,
    GraphVertex,
    ObjectRegion,
    SceneGraph,
    SupportSolution,
    WALL,
)

ROOT_ID = 0
HIDDEN_ID = 1


def build_graph(
    solution: SupportSolution,
    regions: list[ObjectRegion],
    scene_id: str,
    scene_type: str,
    class_names: tuple[str, ...],
    bboxes: dict[int, tuple[float, float, float, float]] | None = None,
    attributes: dict[int, tuple[str, ...]] | None = None,
) -> SceneGraph:
    """Assemble the layered graph for one scene.

    ``regions`` must be ordered like the solution's assignments.  Object
    vertex ids are 2 + object index; 0 and 1 are the root and hidden.
    """
    bboxes = bboxes or {}
    attributes = attributes or {}
    n = len(solution.assignments)
    if len(regions) != n:
        raise ValueError(f"{len(regions)} regions for {n} assignments")

    vertices = [
        GraphVertex(ROOT_ID, "root", scene_type),
        GraphVertex(HIDDEN_ID, "hidden", HIDDEN_LABEL),
    ]
    for idx, (a, region) in enumerate(zip(solution.assignments, regions)):
        z_range = (region.bounds[4], region.bounds[5]) if region is not None else None
        vertices.append(
            GraphVertex(
                vertex_id=2 + idx,
                kind="object",
                label=class_names[a.class_index],
                bbox=bboxes.get(a.detection_id),
                z_range=z_range,
                attributes=tuple(sorted(attributes.get(a.detection_id, ()))),
            )
        )

    structural = [2 + i for i in range(n) if vertices[2 + i].label in (GROUND, WALL, CEILING)]
    grounds = sorted(v for v in structural if vertices[v].label == GROUND)
    walls = sorted(v for v in structural if vertices[v].label == WALL)
    ceilings = sorted(v for v in structural if vertices[v].label == CEILING)

    edges: dict[int, int] = {}
    # default structural support: walls rest on the ground, ceilings on a wall
    if grounds:
        for wall in walls:
            edges[wall] = grounds[0]
    if walls:
        for ceiling in ceilings:
            edges[ceiling] = walls[0]

    # solution edges for non-structural objects
    children: dict[int, list[int]] = {}
    for idx, a in enumerate(solution.assignments):
        vid = 2 + idx
        if vid in structural:
            continue
        if a.supporter == HIDDEN_SUPPORTER:
            parent = HIDDEN_ID
        elif a.supporter == GROUND_SELF:
            # ground-classified object in a non-ground vocabulary slot cannot
            # happen for valid solutions; guard anyway
            parent = HIDDEN_ID
        else:
            parent = 2 + a.supporter
        edges[vid] = parent

    for child, parent in edges.items():
        children.setdefault(parent, []).append(child)

    # breadth-first reachability from the root layer
    frontier = sorted(structural) + [HIDDEN_ID]
    reached = set(frontier)
    while frontier:
        node = frontier.pop(0)
        for child in sorted(children.get(node, [])):
            if child not in reached:
                reached.add(child)
                frontier.append(child)

    for idx in range(n):
        vid = 2 + idx
        if vid not in reached and vid not in structural:
            edges[vid] = HIDDEN_ID  # cycle members and their descendants

    return SceneGraph(
        scene_id=scene_id,
        scene_type=scene_type,
        vertices=tuple(vertices),
        support_edges=frozenset(edges.items()),
        position_edges=frozenset(),
    )


def add_position_edges(
    graph: SceneGraph,
    regions: dict[int, ObjectRegion],
    config: EngineConfig = EngineConfig(),
) -> SceneGraph:
    """Add mirrored relative-position edges between close object pairs.

    ``regions`` maps vertex id -> region.  A pair qualifies when the gap
    between their boxes is below max(configured minimum, half the smaller
    box diagonal); the relation comes from the fixed geometric rules and
    pairs with no firing rule stay unconnected.
    """
    edges: set[tuple[int, int, str]] = set(graph.position_edges)
    ids = sorted(regions)
    for a_pos, vid_a in enumerate(ids):
        for vid_b in ids[a_pos + 1 :]:
            ra, rb = regions[vid_a], regions[vid_b]
            diag_a = np.linalg.norm(
                [ra.bounds[1] - ra.bounds[0], ra.bounds[3] - ra.bounds[2], ra.bounds[5] - ra.bounds[4]]
            )
            diag_b = np.linalg.norm(
                [rb.bounds[1] - rb.bounds[0], rb.bounds[3] - rb.bounds[2], rb.bounds[5] - rb.bounds[4]]
            )
            threshold = max(config.proximity_min_gap, 0.5 * min(diag_a, diag_b))
            if geometry.box_gap(ra, rb) >= threshold:
                continue
            rel = geometry.relative_position(ra, rb)
            if rel is None:
                continue
            edges.add((vid_a, vid_b, rel))
            edges.add((vid_b, vid_a, MIRROR_RELATION[rel]))
    return SceneGraph(
        scene_id=graph.scene_id,
        scene_type=graph.scene_type,
        vertices=graph.vertices,
        support_edges=graph.support_edges,
        position_edges=frozenset(edges),
    )


def graph_classes(graph: SceneGraph) -> list[str]:
    """Class labels the graph contributes to a comparison index.

    The root participates under its scene type; the hidden vertex counts
    only when something is actually supported by it.
    """
    labels = {graph.scene_type}
    labels.update(v.label for v in graph.object_vertices())
    hidden_id = graph.hidden.vertex_id
    if any(parent == hidden_id for _, parent in graph.support_edges):
        labels.add(HIDDEN_LABEL)
    return sorted(labels)


def graph_to_matrix(graph: SceneGraph, class_index: list[str]) -> np.ndarray:
    """Class-by-class support matrix: rows are supported, columns supporting.

    Instance-level support edges OR-aggregate into class cells; the root's
    adjacency to structural vertices (and to a hidden vertex in use) enters
    symmetrically.  Raises KeyError for labels missing from the index.
    """
    pos = {name: k for k, name in enumerate(class_index)}

    def require(label: str) -> int:
        if label not in pos:
            raise KeyError(f"class {label!r} missing from the matrix index")
        return pos[label]

    n = len(class_index)
    matrix = np.zeros((n, n), dtype=int)
    by_id = {v.vertex_id: v for v in graph.vertices}
    hidden_id = graph.hidden.vertex_id
    hidden_used = any(parent == hidden_id for _, parent in graph.support_edges)

    root_label = graph.scene_type
    adjacent = [by_id[v].label for v in graph.root_adjacent_ids() if by_id[v].kind == "object"]
    if hidden_used:
        adjacent.append(HIDDEN_LABEL)
    for label in adjacent:
        matrix[require(root_label), require(label)] = 1
        matrix[require(label), require(root_label)] = 1

    for child, parent in graph.support_edges:
        child_label = by_id[child].label
        parent_label = by_id[parent].label
        matrix[require(child_label), require(parent_label)] = 1
    return matrix
