"""Layered graph construction, position edges, class matrices."""

import numpy as np
import pytest

from supportgraph.config import EngineConfig
from supportgraph.energy import SupportProblem
from supportgraph.graph_build import (
    HIDDEN_ID,
    ROOT_ID,
    add_position_edges,
    build_graph,
    graph_classes,
    graph_to_matrix,
)
from supportgraph.model import (
    EnergyBreakdown,
    GROUND_SELF,
    HIDDEN_SUPPORTER,
    MIRROR_RELATION,
    ObjectAssignment,
    SUPPORT_BEHIND,
    SUPPORT_BELOW,
    SupportSolution,
    validate_graph,
)
from supportgraph import sceneio
from supportgraph.geometry import summarize_region
from supportgraph.config import AlignmentConfig

CLASSES = ("ground", "wall", "ceiling", "table", "sofa", "picture", "cup", "book")


def solution(assignments):
    return SupportSolution(
        assignments=tuple(assignments),
        energy=0.0,
        breakdown=EnergyBreakdown(0, 0, 0, 0, 0),
    )


def region_at(did, x, y, z, size=0.4):
    offs = np.array([[0, 0, 0], [size, size, size]])
    pts = np.array([x, y, z]) + offs
    normals = np.tile([0.0, 1.0, 0.0], (2, 1))
    return summarize_region(did, np.arange(2), pts, normals, pts[:, 2], AlignmentConfig())


def layered_fixture():
    """ground, wall, table and sofa on ground, picture on wall, cup and book
    on table: the canonical demo layout."""
    names = ("ground", "wall", "sofa", "table", "picture", "cup", "book")
    idx = {n: CLASSES.index(n) for n in names}
    assignments = [
        ObjectAssignment(0, idx["ground"], GROUND_SELF, None),
        ObjectAssignment(1, idx["wall"], HIDDEN_SUPPORTER, SUPPORT_BELOW),  # overridden by defaults
        ObjectAssignment(2, idx["sofa"], 0, SUPPORT_BELOW),
        ObjectAssignment(3, idx["table"], 0, SUPPORT_BELOW),
        ObjectAssignment(4, idx["picture"], 1, SUPPORT_BEHIND),
        ObjectAssignment(5, idx["cup"], 3, SUPPORT_BELOW),
        ObjectAssignment(6, idx["book"], 3, SUPPORT_BELOW),
    ]
    regions = [
        region_at(0, 0, 0, 0),
        region_at(1, 0, 1, 3),
        region_at(2, -1, 0.1, 1),
        region_at(3, 1, 0.1, 1),
        region_at(4, 0, 1.5, 2.9),
        region_at(5, 1.0, 0.6, 1.0),
        region_at(6, 1.2, 0.6, 1.2),
    ]
    return assignments, regions


def vid(i):
    return 2 + i


def test_layered_graph_matches_expected_topology():
    assignments, regions = layered_fixture()
    graph = build_graph(solution(assignments), regions, "demo", "dining room", CLASSES)
    assert validate_graph(graph) == []
    assert graph.root.label == "dining room"
    # layer one: the structural vertices plus hidden
    assert set(graph.root_adjacent_ids()) == {HIDDEN_ID, vid(0), vid(1)}
    expected_edges = {
        (vid(1), vid(0)),  # wall on ground by default
        (vid(2), vid(0)),
        (vid(3), vid(0)),
        (vid(4), vid(1)),
        (vid(5), vid(3)),
        (vid(6), vid(3)),
    }
    assert graph.support_edges == frozenset(expected_edges)


def test_ceiling_defaults_to_wall():
    assignments = [
        ObjectAssignment(0, CLASSES.index("ground"), GROUND_SELF, None),
        ObjectAssignment(1, CLASSES.index("wall"), 0, SUPPORT_BELOW),
        ObjectAssignment(2, CLASSES.index("ceiling"), HIDDEN_SUPPORTER, SUPPORT_BELOW),
    ]
    regions = [region_at(0, 0, 0, 0), region_at(1, 0, 1, 3), region_at(2, 0, 2.5, 1.5)]
    graph = build_graph(solution(assignments), regions, "s", "kitchen", CLASSES)
    assert (vid(2), vid(1)) in graph.support_edges
    assert (vid(1), vid(0)) in graph.support_edges


def test_two_object_cycle_goes_to_hidden():
    assignments = [
        ObjectAssignment(0, CLASSES.index("cup"), 1, SUPPORT_BELOW),
        ObjectAssignment(1, CLASSES.index("book"), 0, SUPPORT_BELOW),
    ]
    regions = [region_at(0, 0, 0.5, 1), region_at(1, 0.2, 0.5, 1)]
    graph = build_graph(solution(assignments), regions, "s", "office", CLASSES)
    assert graph.support_edges == frozenset({(vid(0), HIDDEN_ID), (vid(1), HIDDEN_ID)})
    assert validate_graph(graph) == []


def test_chain_into_cycle_also_hidden():
    assignments = [
        ObjectAssignment(0, CLASSES.index("cup"), 1, SUPPORT_BELOW),
        ObjectAssignment(1, CLASSES.index("book"), 0, SUPPORT_BELOW),
        ObjectAssignment(2, CLASSES.index("picture"), 0, SUPPORT_BEHIND),
    ]
    regions = [region_at(0, 0, 0.5, 1), region_at(1, 0.2, 0.5, 1), region_at(2, 0.4, 0.5, 1)]
    graph = build_graph(solution(assignments), regions, "s", "office", CLASSES)
    assert (vid(2), HIDDEN_ID) in graph.support_edges


def test_zero_detections_graph():
    graph = build_graph(solution([]), [], "empty", "bedroom", CLASSES)
    assert len(graph.vertices) == 2
    assert graph.support_edges == frozenset()
    assert validate_graph(graph) == []


def test_position_edges_close_pair_mirrored():
    assignments = [
        ObjectAssignment(0, CLASSES.index("sofa"), HIDDEN_SUPPORTER, SUPPORT_BELOW),
        ObjectAssignment(1, CLASSES.index("table"), HIDDEN_SUPPORTER, SUPPORT_BELOW),
    ]
    # table in front of the sofa: x overlap, sofa strictly behind in z
    sofa = region_at(0, 0.0, 0.0, 2.0, size=1.0)
    table = region_at(1, 0.2, 0.0, 0.5, size=1.0)
    graph = build_graph(solution(assignments), [sofa, table], "s", "living room", CLASSES)
    graph = add_position_edges(graph, {vid(0): sofa, vid(1): table})
    assert (vid(0), vid(1), "behind") in graph.position_edges
    assert (vid(1), vid(0), "front") in graph.position_edges
    for i, j, rel in graph.position_edges:
        assert (j, i, MIRROR_RELATION[rel]) in graph.position_edges


def test_position_edges_far_pair_skipped():
    assignments = [
        ObjectAssignment(0, CLASSES.index("sofa"), HIDDEN_SUPPORTER, SUPPORT_BELOW),
        ObjectAssignment(1, CLASSES.index("table"), HIDDEN_SUPPORTER, SUPPORT_BELOW),
    ]
    a = region_at(0, 0, 0, 0)
    b = region_at(1, 50, 0, 50)
    graph = build_graph(solution(assignments), [a, b], "s", "living room", CLASSES)
    graph = add_position_edges(graph, {vid(0): a, vid(1): b})
    assert graph.position_edges == frozenset()


def test_matrix_reproduces_kitchen_demo_ground_truth(kitchen_gt):
    graph = sceneio.load_graph(kitchen_gt)
    index = ["kitchen", "ground", "wall", "table", "chair", "picture", "cup", "book"]
    matrix = graph_to_matrix(graph, index)
    expected = np.zeros((8, 8), dtype=int)

    def put(supported, supporting):
        expected[index.index(supported), index.index(supporting)] = 1

    put("kitchen", "ground"), put("kitchen", "wall")
    put("ground", "kitchen"), put("wall", "kitchen")
    put("table", "ground"), put("chair", "ground"), put("picture", "wall")
    put("cup", "table"), put("book", "table")
    assert matrix.sum() == 9
    assert np.array_equal(matrix, expected)


def test_matrix_error_fixture_flips_two_cells(kitchen_gt, kitchen_err):
    index = ["kitchen", "ground", "wall", "table", "chair", "picture", "cup", "book"]
    gt = graph_to_matrix(sceneio.load_graph(kitchen_gt), index)
    err = graph_to_matrix(sceneio.load_graph(kitchen_err), index)
    diff = gt != err
    assert diff.sum() == 2
    assert err[index.index("table"), index.index("wall")] == 1
    assert err[index.index("table"), index.index("ground")] == 0


def test_matrix_empty_graph_is_zero():
    graph = build_graph(solution([]), [], "empty", "bedroom", CLASSES)
    matrix = graph_to_matrix(graph, ["bedroom", "table"])
    assert matrix.sum() == 0


def test_matrix_invariant_to_instance_multiplicity():
    one_cup = [
        ObjectAssignment(0, CLASSES.index("ground"), GROUND_SELF, None),
        ObjectAssignment(1, CLASSES.index("table"), 0, SUPPORT_BELOW),
        ObjectAssignment(2, CLASSES.index("cup"), 1, SUPPORT_BELOW),
    ]
    two_cups = one_cup + [ObjectAssignment(3, CLASSES.index("cup"), 1, SUPPORT_BELOW)]
    regions1 = [region_at(0, 0, 0, 0), region_at(1, 0, 0.4, 0), region_at(2, 0, 0.9, 0)]
    regions2 = regions1 + [region_at(3, 0.3, 0.9, 0)]
    index = ["office", "ground", "table", "cup"]
    m1 = graph_to_matrix(build_graph(solution(one_cup), regions1, "s", "office", CLASSES), index)
    m2 = graph_to_matrix(build_graph(solution(two_cups), regions2, "s", "office", CLASSES), index)
    assert np.array_equal(m1, m2)


def test_matrix_missing_class_raises():
    assignments = [
        ObjectAssignment(0, CLASSES.index("ground"), GROUND_SELF, None),
        ObjectAssignment(1, CLASSES.index("table"), 0, SUPPORT_BELOW),
    ]
    regions = [region_at(0, 0, 0, 0), region_at(1, 0, 0.4, 0)]
    graph = build_graph(solution(assignments), regions, "s", "bedroom", CLASSES)
    with pytest.raises(KeyError):
        graph_to_matrix(graph, ["bedroom", "ground"])  # no "table" entry


def test_hidden_enters_matrix_only_when_used():
    unused = build_graph(solution([]), [], "s", "office", CLASSES)
    assert "hidden" not in graph_classes(unused)
    used = build_graph(
        solution([ObjectAssignment(0, CLASSES.index("cup"), HIDDEN_SUPPORTER, SUPPORT_BELOW)]),
        [region_at(0, 0, 0.5, 1)],
        "s",
        "office",
        CLASSES,
    )
    assert "hidden" in graph_classes(used)
    index = ["office", "cup", "hidden"]
    matrix = graph_to_matrix(used, index)
    assert matrix[index.index("cup"), index.index("hidden")] == 1
    assert matrix[index.index("office"), index.index("hidden")] == 1
