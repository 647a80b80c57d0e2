"""Pairwise support features for a (supported, supporter) region pair.

20 dimensions in three blocks:

  geometry (8): min vertical + horizontal gap (2), centroid distance (1),
      lowest height of each region above the floor (2), fraction of the
      supporter farther from the viewer (1), supported-region containment
      in the supporter's floor-projection hull (1) and in the hull of its
      horizontal points only (1)
  shape (9): count + fraction of horizontal pixels in supporter and
      supported (4), count + fraction of vertical pixels likewise (4),
      chi-squared distance between floor-occupancy histograms (1)
  region (3): pixel-count ratio supported/supporter (1), image-plane
      8-neighbourhood adjacency (1), hidden-supporter flag (1)

A hidden supporter gets sentinel values: distances 10.0, all counts,
fractions and ratios 0, the hidden flag 1.
"""

from __future__ import annotations

import numpy as np

from .geometry import min_horizontal_distance, min_vertical_distance
from .model import ObjectRegion

N_FEATURES = 20
HIDDEN_DISTANCE_SENTINEL = 10.0
HISTOGRAM_BINS = 16
CHI2_EPS = 1e-9


def _cross2d(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Andrew monotone chain hull, counter-clockwise without repeated end.

    Degenerate inputs (fewer than 3 distinct, or collinear points) return
    the distinct points themselves (a point or a segment's endpoints).
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2 and _cross2d(chain[-1] - chain[-2], p - chain[-2]) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:  # all points collinear
        return pts[[0, -1]]
    return hull


def _point_on_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    ab = b - a
    ap = p - a
    if abs(_cross2d(ab, ap)) > tol * max(1.0, np.linalg.norm(ab)):
        return False
    t = ap @ ab
    return -tol <= t <= ab @ ab + tol


def points_in_hull(points: np.ndarray, hull: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Boolean containment (boundary inclusive) against a hull, segment, or point."""
    points = np.asarray(points, dtype=float)
    hull = np.asarray(hull, dtype=float)
    if len(hull) == 0:
        return np.zeros(len(points), dtype=bool)
    if len(hull) == 1:
        return np.linalg.norm(points - hull[0], axis=1) <= tol
    if len(hull) == 2:
        return np.array([_point_on_segment(p, hull[0], hull[1], tol) for p in points])
    inside = np.ones(len(points), dtype=bool)
    for k in range(len(hull)):
        a = hull[k]
        b = hull[(k + 1) % len(hull)]
        edge = b - a
        # CCW hull: inside points lie on the left of every edge
        cross = edge[0] * (points[:, 1] - a[1]) - edge[1] * (points[:, 0] - a[0])
        inside &= cross >= -tol
    return inside


def _containment_fraction(supported: np.ndarray, supporter_pts: np.ndarray) -> float:
    if len(supporter_pts) == 0 or len(supported) == 0:
        return 0.0
    hull = convex_hull_2d(supporter_pts)
    return float(points_in_hull(supported, hull).mean())


def _occupancy_histogram(footprint: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    span = np.maximum(hi - lo, 1e-12)
    cells = np.clip(((footprint - lo) / span * HISTOGRAM_BINS).astype(int), 0, HISTOGRAM_BINS - 1)
    hist = np.zeros((HISTOGRAM_BINS, HISTOGRAM_BINS))
    np.add.at(hist, (cells[:, 0], cells[:, 1]), 1.0)
    return hist / hist.sum()


def chi_squared_footprints(a: ObjectRegion, b: ObjectRegion) -> float:
    """0.5 * sum (p-q)^2 / (p+q+eps) over a shared 16x16 floor grid."""
    fa, fb = a.footprint(), b.footprint()
    lo = np.minimum(fa.min(axis=0), fb.min(axis=0))
    hi = np.maximum(fa.max(axis=0), fb.max(axis=0))
    ha = _occupancy_histogram(fa, lo, hi)
    hb = _occupancy_histogram(fb, lo, hi)
    return float(0.5 * ((ha - hb) ** 2 / (ha + hb + CHI2_EPS)).sum())


def regions_adjacent(a: ObjectRegion, b: ObjectRegion, image_width: int) -> bool:
    """8-neighbourhood adjacency of the two pixel sets in the image plane."""
    small, large = (a, b) if a.n_pixels <= b.n_pixels else (b, a)
    other = set(int(p) for p in large.pixels)
    w = image_width
    for p in small.pixels:
        p = int(p)
        u = p % w
        for dv in (-1, 0, 1):
            for du in (-1, 0, 1):
                if du == 0 and dv == 0:
                    continue
                if not 0 <= u + du < w:
                    continue
                if p + dv * w + du in other:
                    return True
    return False


def support_features(
    supported: ObjectRegion,
    supporter: ObjectRegion | None,
    floor_height: float,
    image_width: int,
) -> np.ndarray:
    """The 20-dim feature vector for "supporter supports supported".

    The vector is asymmetric in its arguments.  ``supporter=None`` means
    the hidden placeholder and produces the documented sentinels.
    """
    out = np.zeros(N_FEATURES)
    if supporter is None:
        out[0] = out[1] = out[2] = HIDDEN_DISTANCE_SENTINEL   # G1, G2
        out[3] = out[4] = HIDDEN_DISTANCE_SENTINEL            # G3
        out[16] = HIDDEN_DISTANCE_SENTINEL                    # S5
        out[19] = 1.0                                         # R3
        return out

    out[0] = min_vertical_distance(supported, supporter)
    out[1] = min_horizontal_distance(supported, supporter)
    out[2] = float(np.linalg.norm(np.subtract(supported.centroid, supporter.centroid)))
    out[3] = supported.h_bottom - floor_height
    out[4] = supporter.h_bottom - floor_height
    out[5] = float((supporter.camera_depth > np.mean(supported.camera_depth)).mean())
    out[6] = _containment_fraction(supported.footprint(), supporter.footprint())
    out[7] = _containment_fraction(
        supported.footprint(), supporter.footprint()[supporter.horizontal_mask]
    )
    out[8] = supporter.n_horizontal
    out[9] = supporter.n_horizontal / supporter.n_pixels
    out[10] = supported.n_horizontal
    out[11] = supported.n_horizontal / supported.n_pixels
    out[12] = supporter.n_vertical
    out[13] = supporter.n_vertical / supporter.n_pixels
    out[14] = supported.n_vertical
    out[15] = supported.n_vertical / supported.n_pixels
    out[16] = chi_squared_footprints(supported, supporter)
    out[17] = supported.n_pixels / supporter.n_pixels
    out[18] = float(regions_adjacent(supported, supporter, image_width))
    out[19] = 0.0
    return out
