"""Room-coordinate alignment and 3D geometry helpers.

The aligned frame follows the Manhattan-world assumption: most visible
surfaces lie along one of three orthogonal directions.  Candidate triads
are generated from near-vertical line directions and scored against the
surface normals and line directions; the winner becomes (v_x, v_y, v_z)
with v_y pointing up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import AlignmentConfig
from .model import ObjectRegion


@dataclass(frozen=True)
class AlignmentCandidate:
    """An orthonormal triad with its alignment score."""

    triad: np.ndarray  # (3, 3), columns are the directions
    score: float

    def __post_init__(self):
        t = np.asarray(self.triad, dtype=float)
        if not np.allclose(t.T @ t, np.eye(3), atol=1e-6):
            raise ValueError("triad must be orthonormal")
        object.__setattr__(self, "triad", t)


@dataclass(frozen=True)
class AlignmentResult:
    triad: np.ndarray          # columns (v_x, v_y, v_z)
    score: float
    aligned_points: np.ndarray
    fallback: bool = False     # True when no candidates could be generated


def score_candidate(
    triad: np.ndarray,
    normals: np.ndarray,
    lines: np.ndarray | None,
    config: AlignmentConfig,
    label_probs: np.ndarray | None = None,
) -> float:
    """Alignment score of one orthonormal triad.

    Per direction the normals contribute the mean of
    exp(-(n . v)^2 / sigma^2), i.e. directions orthogonal to many surface
    normals score high; lines contribute the same kernel on their
    directions.  Pixels known to belong to ground/wall regions add their
    predicted probability once (scaled like a normal-score vote), a bonus
    for trusting labelled structure.
    """
    normals = np.asarray(normals, dtype=float)
    if normals.size == 0:
        raise ValueError("cannot score a triad with no surface normals")
    triad = np.asarray(triad, dtype=float)
    inv_sigma2 = 1.0 / config.sigma**2

    proj = normals @ triad  # (M, 3)
    score = config.normal_weight * float(np.exp(-(proj**2) * inv_sigma2).mean(axis=0).sum())
    if label_probs is not None and len(label_probs):
        score += config.normal_weight * float(np.sum(label_probs)) / len(normals)
    if lines is not None and len(lines):
        lproj = np.asarray(lines, dtype=float) @ triad
        score += config.line_weight * float(np.exp(-(lproj**2) * inv_sigma2).mean(axis=0).sum())
    return score


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _plane_basis(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis of the plane perpendicular to ``axis``."""
    helper = np.array([1.0, 0.0, 0.0])
    if abs(axis @ helper) > 0.9:
        helper = np.array([0.0, 0.0, 1.0])
    e1 = _unit(np.cross(axis, helper))
    e2 = np.cross(axis, e1)
    return e1, e2


def generate_candidates(lines: list, config: AlignmentConfig) -> list[np.ndarray]:
    """Candidate triads: for every near-vertical line direction, sweep the
    in-plane angle of the two orthogonal directions in fixed steps.

    Falls back to the global +Y axis when no line qualifies, so a candidate
    set always exists for non-degenerate input.
    """
    cos_near = np.cos(np.radians(config.near_y_threshold_deg))
    up_axes: list[np.ndarray] = []
    for line in lines:
        d = _unit(np.asarray(line.direction, dtype=float))
        near = line.near_y if line.near_y is not None else abs(d[1]) >= cos_near
        if near:
            up_axes.append(d if d[1] >= 0 else -d)
    if not up_axes:
        up_axes.append(np.array([0.0, 1.0, 0.0]))

    triads = []
    for axis in up_axes:
        e1, e2 = _plane_basis(axis)
        for deg in np.arange(0.0, 90.0, config.sweep_step_deg):
            a = np.radians(deg)
            v1 = np.cos(a) * e1 + np.sin(a) * e2
            v3 = np.cross(axis, v1)
            triads.append(np.column_stack([v1, axis, v3]))
    return triads


def align_coordinates(
    points: np.ndarray,
    normals: np.ndarray,
    lines: list,
    config: AlignmentConfig,
    label_probs: np.ndarray | None = None,
    ground_mask: np.ndarray | None = None,
) -> AlignmentResult:
    """Pick the best-scoring triad and re-express all points in it.

    ``label_probs`` are per-pixel ground/wall probabilities (zero or absent
    elsewhere); ``ground_mask`` marks pixels of ground-labelled regions and
    fixes the sign of the up axis so the ground ends up lowest.
    Ties between equal-scoring candidates go to the lowest candidate index.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    if normals.size == 0:
        return AlignmentResult(np.eye(3), 0.0, points.copy(), fallback=True)

    line_dirs = np.array([l.direction for l in lines], dtype=float) if lines else None
    candidates = generate_candidates(lines, config)
    scores = [score_candidate(t, normals, line_dirs, config, label_probs) for t in candidates]
    best = int(np.argmax(scores))
    winner = AlignmentCandidate(candidates[best], float(scores[best]))  # checks orthonormality
    triad = winner.triad

    # v_y = direction closest to the original Y axis, sign made consistent
    y_align = np.abs(triad[1, :])
    y_col = int(np.argmax(y_align))
    v_y = triad[:, y_col] if triad[1, y_col] >= 0 else -triad[:, y_col]
    rest = [triad[:, c] for c in range(3) if c != y_col]
    x_align = [abs(v[0]) for v in rest]
    v_x = rest[int(np.argmax(x_align))]
    if v_x[0] < 0:
        v_x = -v_x
    v_z = np.cross(v_x, v_y)
    rotation = np.column_stack([v_x, v_y, v_z])

    aligned = points @ rotation
    if ground_mask is not None and ground_mask.any():
        # flip the up axis if labelled ground sits above the rest
        ground_y = aligned[ground_mask, 1].mean()
        other = aligned[~ground_mask, 1]
        if other.size and ground_y > other.mean():
            rotation = np.column_stack([v_x, -v_y, np.cross(v_x, -v_y)])
            aligned = points @ rotation
    return AlignmentResult(rotation, float(scores[best]), aligned)


def summarize_region(
    detection_id: int,
    pixels: np.ndarray,
    aligned_points: np.ndarray,
    normals: np.ndarray,
    camera_depth: np.ndarray,
    config: AlignmentConfig = AlignmentConfig(),
) -> ObjectRegion:
    """Per-object 3D summary: exact extents plus surface-orientation counts.

    A pixel is horizontal when its normal is within the configured cone of
    the up axis, vertical when within the same cone of the horizontal plane.
    """
    pixels = np.asarray(pixels, dtype=int)
    if pixels.size == 0:
        raise ValueError("cannot summarize an empty pixel set")
    pts = np.asarray(aligned_points, dtype=float)
    if pts.shape != (pixels.size, 3):
        raise ValueError(f"points shape {pts.shape} does not match {pixels.size} pixels")

    nrm = np.asarray(normals, dtype=float)
    norms = np.linalg.norm(nrm, axis=1)
    ny = np.divide(nrm[:, 1], norms, out=np.zeros_like(norms), where=norms > 0)
    cone = np.radians(config.surface_cone_deg)
    horizontal = ny > np.cos(cone)           # normal points up within the cone
    vertical = np.abs(ny) < np.sin(cone)     # normal close to the horizontal plane

    mins = pts.min(axis=0)
    maxs = pts.max(axis=0)
    order = np.argsort(pixels)
    return ObjectRegion(
        detection_id=detection_id,
        pixels=pixels[order],
        points=pts[order],
        camera_depth=np.asarray(camera_depth, dtype=float)[order],
        horizontal_mask=horizontal[order],
        vertical_mask=vertical[order],
        bounds=(mins[0], maxs[0], mins[1], maxs[1], mins[2], maxs[2]),
        centroid=tuple(pts.mean(axis=0)),
    )


def min_horizontal_distance(a: ObjectRegion, b: ObjectRegion) -> float:
    """Minimum floor-plane (x, z) distance over all point pairs. Exact O(nm)."""
    pa = a.footprint()
    pb = b.footprint()
    best = np.inf
    # chunk the outer loop so the pairwise matrix stays small
    for start in range(0, len(pa), 512):
        chunk = pa[start : start + 512]
        d2 = ((chunk[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def min_vertical_distance(a: ObjectRegion, b: ObjectRegion) -> float:
    """Exact minimum |y_a - y_b| over point pairs (merge of sorted heights)."""
    ya = np.sort(a.points[:, 1])
    yb = np.sort(b.points[:, 1])
    best = np.inf
    i = j = 0
    while i < len(ya) and j < len(yb):
        best = min(best, abs(ya[i] - yb[j]))
        if ya[i] <= yb[j]:
            i += 1
        else:
            j += 1
    return float(best)


def box_gap(a: ObjectRegion, b: ObjectRegion) -> float:
    """Euclidean gap between the two axis-aligned bounding boxes."""
    gaps = []
    for axis in range(3):
        lo_a, hi_a = a.bounds[2 * axis], a.bounds[2 * axis + 1]
        lo_b, hi_b = b.bounds[2 * axis], b.bounds[2 * axis + 1]
        gaps.append(max(0.0, lo_a - hi_b, lo_b - hi_a))
    return float(np.linalg.norm(gaps))


def _interval_overlap(lo_a, hi_a, lo_b, hi_b) -> bool:
    return min(hi_a, hi_b) >= max(lo_a, lo_b)


def _directed_relation(i: ObjectRegion, j: ObjectRegion) -> str | None:
    """First matching rule, in fixed order, for 'i is <relation> of j'."""
    xi0, xi1, yi0, yi1, zi0, zi1 = i.bounds
    xj0, xj1, yj0, yj1, zj0, zj1 = j.bounds
    x_overlap = _interval_overlap(xi0, xi1, xj0, xj1)
    z_overlap = _interval_overlap(zi0, zi1, zj0, zj1)

    if yi0 > yj1 and zj0 < zi0 < zj1 and x_overlap and z_overlap:
        return "above"
    if zi0 >= zj1 and x_overlap:
        return "behind"
    if 0.5 * (zi0 + zi1) > zj1 and x_overlap:
        return "behind"
    if zj0 < 0.5 * (zi0 + zi1) < zj1 and 0.5 * (xi0 + xi1) > xj1:
        return "right"
    return None


_MIRROR = {"above": "under", "behind": "front", "right": "left"}


def relative_position(i: ObjectRegion, j: ObjectRegion) -> str | None:
    """Relation of region ``i`` with respect to ``j``, or None.

    Rules fire in the order above, behind (two variants), right; the
    mirrored relations come from evaluating the swapped pair.  The pair is
    canonicalized by detection id so that relative_position(i, j) and
    relative_position(j, i) are always exact mirrors.
    """
    if i.detection_id == j.detection_id:
        return None
    if i.detection_id > j.detection_id:
        rel = relative_position(j, i)
        if rel is None:
            return None
        inverse = dict(_MIRROR)
        inverse.update({v: k for k, v in _MIRROR.items()})
        return inverse[rel]

    rel = _directed_relation(i, j)
    if rel is not None:
        return rel
    rel = _directed_relation(j, i)
    if rel is not None:
        return _MIRROR[rel]
    return None
