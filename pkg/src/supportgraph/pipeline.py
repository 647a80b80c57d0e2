"""End-to-end inference: detections in, support solution and graph out."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import detection, features, geometry, scoring
from .config import EngineConfig
from .energy import SupportProblem
from .model import (
    Detection,
    GROUND,
    ObjectRegion,
    PriorTables,
    SceneBundle,
    SceneGraph,
    SupportSolution,
    WALL,
)
from .graph_build import add_position_edges, build_graph
from .solver import SolveStats, exhaustive_minimize, solve_support

logger = logging.getLogger(__name__)


@dataclass
class InferenceResult:
    bundle: SceneBundle
    detections: list[Detection]
    regions: list[ObjectRegion]
    alignment: geometry.AlignmentResult
    scene_type: str
    solution: SupportSolution
    problem: SupportProblem
    stats: SolveStats


def prepare_regions(
    bundle: SceneBundle, config: EngineConfig
) -> tuple[list[Detection], list[ObjectRegion], geometry.AlignmentResult]:
    """NMS, segmentation, alignment, and per-object summaries."""
    kept = detection.weighted_nms(list(bundle.detections), config.nms_weight, config.nms_iou_threshold)
    pixel_map = detection.segment_objects(
        kept, bundle.superpixels, bundle.image_size, config.segmentation_ratio
    )
    empty = [d for d in kept if d.detection_id not in pixel_map]
    if empty:
        logger.warning(
            "dropping %d detections with no assigned superpixels: %s",
            len(empty),
            [d.detection_id for d in empty],
        )
    kept = [d for d in kept if d.detection_id in pixel_map]

    n_pixels = bundle.points.shape[0]
    label_probs = np.zeros(n_pixels)
    ground_mask = np.zeros(n_pixels, dtype=bool)
    for det in kept:
        cls_name = bundle.class_names[det.best_class()]
        if cls_name in (GROUND, WALL):
            pixels = pixel_map[det.detection_id]
            label_probs[pixels] = det.class_scores[det.best_class()]
            if cls_name == GROUND:
                ground_mask[pixels] = True

    alignment = geometry.align_coordinates(
        bundle.points,
        bundle.normals,
        list(bundle.lines),
        config.alignment,
        label_probs=label_probs,
        ground_mask=ground_mask,
    )

    regions = []
    for det in kept:
        pixels = pixel_map[det.detection_id]
        regions.append(
            geometry.summarize_region(
                det.detection_id,
                pixels,
                alignment.aligned_points[pixels],
                bundle.normals[pixels] @ alignment.triad,
                bundle.points[pixels, 2],
                config.alignment,
            )
        )
    return kept, regions, alignment


def build_support_problem(
    bundle: SceneBundle,
    detections: list[Detection],
    regions: list[ObjectRegion],
    priors: PriorTables,
    config: EngineConfig,
) -> tuple[SupportProblem, str]:
    """Assemble the dense energy inputs for the surviving objects."""
    if bundle.class_names != priors.class_names:
        raise ValueError("scene and priors disagree on the class vocabulary")
    scene_idx, scene_probs = scoring.scene_posterior(bundle)
    scene_type = bundle.scene_names[scene_idx]

    n = len(regions)
    id_to_pos = {d.detection_id: k for k, d in enumerate(bundle.detections)}

    gap = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            gap[i, j] = gap[j, i] = geometry.min_horizontal_distance(regions[i], regions[j])

    if n == 0:
        probs = np.zeros((0, 1, 3))
    elif bundle.support_probabilities is not None or bundle.support_features is not None:
        full = scoring.support_probabilities(bundle)
        n_all = bundle.n_detections
        probs = np.zeros((n, n + 1, 3))
        for i, di in enumerate(detections):
            for j, dj in enumerate(detections):
                if i != j:
                    probs[i, j] = full[id_to_pos[di.detection_id], id_to_pos[dj.detection_id]]
            probs[i, n] = full[id_to_pos[di.detection_id], n_all]
    else:
        if bundle.support_classifier is None:
            raise ValueError("bundle provides no support probabilities, features, or classifier")
        floor = min(r.h_bottom for r in regions)
        width = bundle.image_size[1]
        probs = np.zeros((n, n + 1, 3))
        for i in range(n):
            for j in range(n):
                if i != j:
                    vec = features.support_features(regions[i], regions[j], floor, width)
                    probs[i, j] = scoring.softmax_predict(bundle.support_classifier, vec)
            vec = features.support_features(regions[i], None, floor, width)
            probs[i, n] = scoring.softmax_predict(bundle.support_classifier, vec)

    class_probs = np.array([d.class_scores for d in detections], dtype=float).reshape(
        n, len(priors.class_names)
    )
    problem = SupportProblem(
        class_names=priors.class_names,
        heights_bottom=np.array([r.h_bottom for r in regions]),
        heights_top=np.array([r.h_top for r in regions]),
        horizontal_gap=gap,
        support_probs=probs,
        class_probs=class_probs,
        class_given_scene=priors.class_given_scene[:, scene_idx],
        scene_prob=float(scene_probs[scene_idx]),
        support_prior=priors.support_prior,
        detection_ids=tuple(d.detection_id for d in detections),
    )
    return problem, scene_type


def run_inference(
    bundle: SceneBundle,
    priors: PriorTables,
    config: EngineConfig = EngineConfig(),
    check_with_oracle: bool = False,
) -> InferenceResult:
    """Full pipeline for one scene; optionally cross-check the solver."""
    detections_kept, regions, alignment = prepare_regions(bundle, config)
    problem, scene_type = build_support_problem(bundle, detections_kept, regions, priors, config)
    stats = SolveStats()
    solution = solve_support(problem, config.energy, stats=stats)
    if check_with_oracle:
        oracle = exhaustive_minimize(problem, config.energy)
        if abs(oracle.energy - solution.energy) > 1e-9:
            raise AssertionError(
                f"solver objective {solution.energy!r} disagrees with exhaustive minimum {oracle.energy!r}"
            )
    return InferenceResult(
        bundle=bundle,
        detections=detections_kept,
        regions=regions,
        alignment=alignment,
        scene_type=scene_type,
        solution=solution,
        problem=problem,
        stats=stats,
    )


def result_to_graph(result: InferenceResult, config: EngineConfig = EngineConfig()) -> SceneGraph:
    """Layered graph with attributes and relative-position edges."""
    attributes = {}
    if result.bundle.rgb is not None:
        for region in result.regions:
            attributes[region.detection_id] = scoring.color_attributes(region.pixels, result.bundle.rgb)
    bboxes = {d.detection_id: d.bbox for d in result.detections}
    graph = build_graph(
        result.solution,
        result.regions,
        result.bundle.scene_id,
        result.scene_type,
        result.bundle.class_names,
        bboxes=bboxes,
        attributes=attributes,
    )
    region_by_vid = {2 + idx: region for idx, region in enumerate(result.regions)}
    return add_position_edges(graph, region_by_vid, config)
