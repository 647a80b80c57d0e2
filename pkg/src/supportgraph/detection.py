"""Detector post-processing: weighted NMS and superpixel segmentation."""

from __future__ import annotations

import logging

import numpy as np

from .model import Detection

logger = logging.getLogger(__name__)


def iou(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    """Intersection over union of two (u0, v0, u1, v1) boxes."""
    u0 = max(a[0], b[0])
    v0 = max(a[1], b[1])
    u1 = min(a[2], b[2])
    v1 = min(a[3], b[3])
    inter = max(0.0, u1 - u0) * max(0.0, v1 - v0)
    if inter == 0.0:
        return 0.0
    area_a = (a[2] - a[0]) * (a[3] - a[1])
    area_b = (b[2] - b[0]) * (b[3] - b[1])
    return inter / (area_a + area_b - inter)


def weighted_score(det: Detection, w: float) -> float:
    """Combined box confidence and best class score: sb + w * max(sc)."""
    return det.box_score + w * max(det.class_scores)


def weighted_nms(proposals: list[Detection], w: float, iou_threshold: float) -> list[Detection]:
    """Greedy per-class suppression ranked by the weighted score.

    Among mutually overlapping same-class proposals only the best weighted
    score survives; score ties keep the lower detection id.
    """
    if w < 0:
        raise ValueError("w must be >= 0")
    if not 0 < iou_threshold < 1:
        raise ValueError("iou_threshold must lie in (0, 1)")
    ranked = sorted(proposals, key=lambda d: (-weighted_score(d, w), d.detection_id))
    kept: list[Detection] = []
    for det in ranked:
        cls = det.best_class()
        if any(
            other.best_class() == cls and iou(det.bbox, other.bbox) > iou_threshold
            for other in kept
        ):
            continue
        kept.append(det)
    kept.sort(key=lambda d: d.detection_id)
    return kept


def segment_objects(
    boxes: list[Detection],
    superpixels: np.ndarray,
    image_size: tuple[int, int],
    ratio: float = 0.8,
) -> dict[int, np.ndarray]:
    """Assign superpixels to boxes, smallest box first.

    A superpixel joins the first box (in ascending area, ties by id) that
    contains strictly more than ``ratio`` of its pixels; every superpixel
    belongs to at most one box and leftovers stay background.  A pixel at
    (row v, col u) counts as inside a box when u0 <= u < u1, v0 <= v < v1.
    Returns detection id -> sorted flat pixel indices.
    """
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    h, w = image_size
    labels = np.asarray(superpixels).reshape(h, w)
    n_sp = int(labels.max()) + 1 if labels.size else 0
    sp_area = np.bincount(labels.ravel(), minlength=n_sp)

    assigned: dict[int, int] = {}  # superpixel label -> detection id
    for det in sorted(boxes, key=lambda d: (d.area, d.detection_id)):
        u0, v0, u1, v1 = det.bbox
        r0, r1 = max(0, int(np.ceil(v0))), min(h, int(np.ceil(v1)))
        c0, c1 = max(0, int(np.ceil(u0))), min(w, int(np.ceil(u1)))
        if r0 >= r1 or c0 >= c1:
            continue
        window = labels[r0:r1, c0:c1]
        inside = np.bincount(window.ravel(), minlength=n_sp)
        for sp in np.nonzero(inside)[0]:
            if int(sp) in assigned:
                continue
            if inside[sp] > ratio * sp_area[sp]:
                assigned[int(sp)] = det.detection_id

    out: dict[int, np.ndarray] = {}
    flat = labels.ravel()
    for sp, det_id in assigned.items():
        out.setdefault(det_id, []).append(np.nonzero(flat == sp)[0])
    return {det_id: np.sort(np.concatenate(chunks)) for det_id, chunks in out.items()}
