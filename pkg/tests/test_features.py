"""Pairwise support features: geometry, shape, and region blocks."""

import numpy as np
import pytest

from supportgraph.config import AlignmentConfig
from supportgraph.features import (
    HIDDEN_DISTANCE_SENTINEL,
    chi_squared_footprints,
    convex_hull_2d,
    points_in_hull,
    regions_adjacent,
    support_features,
)
from supportgraph.geometry import summarize_region


def region(did, pts, normals=None, pixels=None):
    pts = np.asarray(pts, dtype=float)
    if normals is None:
        normals = np.tile([0.0, 1.0, 0.0], (len(pts), 1))
    if pixels is None:
        pixels = np.arange(len(pts))
    return summarize_region(did, pixels, pts, np.asarray(normals, float), pts[:, 2], AlignmentConfig())


def grid_box(did, x0, x1, y, z0, z1, n=5, pixels=None):
    xs = np.linspace(x0, x1, n)
    zs = np.linspace(z0, z1, n)
    pts = np.array([[x, y, z] for x in xs for z in zs])
    return region(did, pts, pixels=pixels)


def test_identical_regions_self_comparison():
    r = grid_box(0, 0, 1, 0.5, 0, 1)
    vec = support_features(r, r, floor_height=0.0, image_width=10)
    assert vec[0] == 0.0 and vec[1] == 0.0        # zero gaps
    assert vec[2] == 0.0                          # same centroid
    assert vec[6] == 1.0 and vec[7] == 1.0        # full hull containment
    assert vec[17] == 1.0                         # pixel ratio
    assert vec[16] == pytest.approx(0.0, abs=1e-9)
    assert vec[19] == 0.0


def test_two_box_fixture_distances():
    supported = grid_box(0, 0, 1, 1.0, 0, 1)
    supporter = grid_box(1, 0, 1, 0.0, 0, 1)  # same footprint, one metre below
    vec = support_features(supported, supporter, floor_height=0.0, image_width=10)
    assert vec[0] == pytest.approx(1.0, abs=1e-12)   # vertical gap
    assert vec[1] == pytest.approx(0.0, abs=1e-12)   # aligned footprints
    assert vec[2] == pytest.approx(1.0, abs=1e-12)   # centroid distance
    assert vec[3] == pytest.approx(1.0)              # supported height above floor
    assert vec[4] == pytest.approx(0.0)              # supporter sits on the floor


def test_heights_relative_to_floor():
    supported = grid_box(0, 0, 1, 2.0, 0, 1)
    supporter = grid_box(1, 0, 1, 1.2, 0, 1)
    vec = support_features(supported, supporter, floor_height=1.0, image_width=10)
    assert vec[3] == pytest.approx(1.0)
    assert vec[4] == pytest.approx(0.2)


def test_containment_inside_footprint():
    supporter = grid_box(1, 0, 4, 0.0, 0, 4, n=9)
    supported = grid_box(0, 1, 2, 1.0, 1, 2, n=4)
    vec = support_features(supported, supporter, 0.0, 10)
    assert vec[6] == 1.0


def test_containment_against_shapely_oracle():
    shapely = pytest.importorskip("shapely")
    from shapely.geometry import MultiPoint, Point

    rng = np.random.default_rng(4)
    for _ in range(20):
        cloud = rng.normal(size=(30, 2))
        queries = rng.normal(size=(25, 2)) * 1.5
        hull = convex_hull_2d(cloud)
        got = points_in_hull(queries, hull)
        oracle_hull = MultiPoint([tuple(p) for p in cloud]).convex_hull
        expected = np.array(
            [oracle_hull.buffer(1e-9).contains(Point(tuple(q))) for q in queries]
        )
        assert np.array_equal(got, expected)


def test_degenerate_hulls():
    segment = np.array([[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]])
    hull = convex_hull_2d(segment)
    assert len(hull) == 2
    inside = points_in_hull(np.array([[0.25, 0.25], [0.3, 0.0]]), hull)
    assert inside.tolist() == [True, False]
    point = convex_hull_2d(np.array([[2.0, 2.0], [2.0, 2.0]]))
    assert len(point) == 1
    assert points_in_hull(np.array([[2.0, 2.0], [2.1, 2.0]]), point).tolist() == [True, False]


def test_viewer_distance_fraction():
    # camera depth comes from the original z column
    near = grid_box(0, 0, 1, 0.5, 0.0, 0.4)
    far = grid_box(1, 0, 1, 0.0, 2.0, 3.0)
    vec = support_features(near, far, 0.0, 10)
    assert vec[5] == 1.0  # the whole supporter is farther than the supported mean
    vec_rev = support_features(far, near, 0.0, 10)
    assert vec_rev[5] == 0.0


def test_chi_squared_footprints():
    a = grid_box(0, 0, 1, 0.0, 0, 1)
    assert chi_squared_footprints(a, a) == pytest.approx(0.0, abs=1e-12)
    b = grid_box(1, 10, 11, 0.0, 10, 11)
    assert chi_squared_footprints(a, b) == pytest.approx(1.0, rel=1e-6)  # disjoint bins


def test_adjacency_8_neighbourhood():
    width = 10
    a = region(0, np.zeros((2, 3)), pixels=np.array([0, 1]))
    b = region(1, np.zeros((1, 3)), pixels=np.array([11]))  # diagonal neighbour of 1
    c = region(2, np.zeros((1, 3)), pixels=np.array([13]))
    assert regions_adjacent(a, b, width)
    assert not regions_adjacent(a, c, width)
    vec = support_features(a, b, 0.0, width)
    assert vec[18] == 1.0


def test_adjacency_does_not_wrap_rows():
    width = 10
    a = region(0, np.zeros((1, 3)), pixels=np.array([9]))    # end of row 0
    b = region(1, np.zeros((1, 3)), pixels=np.array([10]))   # start of row 1
    assert not regions_adjacent(a, b, width)


def test_hidden_supporter_sentinels():
    r = grid_box(0, 0, 1, 0.5, 0, 1)
    vec = support_features(r, None, 0.0, 10)
    assert vec[0] == vec[1] == vec[2] == HIDDEN_DISTANCE_SENTINEL
    assert vec[3] == vec[4] == HIDDEN_DISTANCE_SENTINEL
    assert vec[16] == HIDDEN_DISTANCE_SENTINEL
    assert (vec[5:16] == 0).all()
    assert vec[17] == 0.0 and vec[18] == 0.0
    assert vec[19] == 1.0


def test_feature_vector_is_asymmetric():
    # different pixel counts and depths make the swap change the vector
    small_high = grid_box(0, 0, 1, 1.0, 0, 1, n=3)
    large_low = grid_box(1, 0, 2, 0.0, 0, 2, n=7)
    forward = support_features(small_high, large_low, 0.0, 10)
    backward = support_features(large_low, small_high, 0.0, 10)
    assert not np.allclose(forward, backward)
    assert forward[17] == pytest.approx(9 / 49)
    assert backward[17] == pytest.approx(49 / 9)


def test_percentages_counts_and_distances_in_range():
    rng = np.random.default_rng(5)
    for _ in range(10):
        a = region(0, rng.normal(size=(20, 3)), normals=_unit(rng.normal(size=(20, 3))))
        b = region(1, rng.normal(size=(20, 3)) + 1, normals=_unit(rng.normal(size=(20, 3))))
        vec = support_features(a, b, float(min(a.h_bottom, b.h_bottom)), 10)
        percent = vec[[5, 6, 7, 9, 11, 13, 15]]
        assert ((0 <= percent) & (percent <= 1)).all()
        assert (vec[[0, 1, 2, 16]] >= 0).all()
        assert vec[[8, 10, 12, 14]].min() >= 0


def _unit(v):
    return v / np.linalg.norm(v, axis=1, keepdims=True)
