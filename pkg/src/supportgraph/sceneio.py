"""On-disk formats: scene documents, prior tables, graph JSON, DOT export.

Schema identifiers are versioned strings ("scene/v1", "priors/v1",
"graph/v1"); see docs/schemas.md for the field-by-field reference.
Loading validates every invariant before returning: a document either
yields a fully valid object or raises SchemaError with the field path.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import (
    Detection,
    GraphVertex,
    HIDDEN_LABEL,
    Line,
    LinearClassifier,
    PriorTables,
    SceneBundle,
    SceneGraph,
    SchemaError,
    validate_graph,
)

SCENE_SCHEMA = "scene/v1"
PRIORS_SCHEMA = "priors/v1"
GRAPH_SCHEMA = "graph/v1"


# ---------------------------------------------------------------------------
# raster codec


def encode_raster(values: np.ndarray, rle: bool = True) -> dict:
    """Encode a flat raster (scalars or fixed-size rows) for JSON storage.

    RLE stores [count, value] pairs over identical consecutive entries,
    which keeps synthetic fixtures small; "dense" stores the plain list.
    """
    arr = np.asarray(values)
    rows = [r.tolist() for r in arr] if arr.ndim == 2 else arr.tolist()
    if not rle:
        return {"encoding": "dense", "data": rows}
    runs: list[list] = []
    for row in rows:
        if runs and runs[-1][1] == row:
            runs[-1][0] += 1
        else:
            runs.append([1, row])
    return {"encoding": "rle", "data": runs}


def decode_raster(doc: dict, path: str) -> np.ndarray:
    if not isinstance(doc, dict) or "encoding" not in doc or "data" not in doc:
        raise SchemaError(path, "raster must be {encoding, data}")
    if doc["encoding"] == "dense":
        return np.asarray(doc["data"])
    if doc["encoding"] == "rle":
        rows = []
        for run in doc["data"]:
            if not (isinstance(run, list) and len(run) == 2):
                raise SchemaError(path, f"bad RLE run {run!r}")
            rows.extend([run[1]] * int(run[0]))
        return np.asarray(rows)
    raise SchemaError(path, f"unknown raster encoding {doc['encoding']!r}")


# ---------------------------------------------------------------------------
# scene documents


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return doc[key]


def _classifier_from_doc(doc: dict, path: str) -> LinearClassifier:
    try:
        return LinearClassifier(
            np.asarray(_require(doc, "weights", path), dtype=float),
            np.asarray(_require(doc, "bias", path), dtype=float),
        )
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def load_scene(path: str | Path) -> SceneBundle:
    """Parse and validate one scene document."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(str(path), f"cannot parse scene file: {exc}") from exc
    if doc.get("schema") != SCENE_SCHEMA:
        raise SchemaError("schema", f"expected {SCENE_SCHEMA!r}, got {doc.get('schema')!r}")

    scene_id = str(_require(doc, "scene_id", "scene"))
    image_size = tuple(_require(doc, "image_size", "scene"))
    if len(image_size) != 2 or any(int(s) <= 0 for s in image_size):
        raise SchemaError("image_size", f"bad image size {image_size}")
    h, w = int(image_size[0]), int(image_size[1])
    n_pixels = h * w

    class_names = tuple(str(c) for c in _require(doc, "classes", "scene"))
    scene_names = tuple(str(s) for s in _require(doc, "scenes", "scene"))

    detections = []
    for k, det_doc in enumerate(_require(doc, "detections", "scene")):
        det = Detection(
            detection_id=int(_require(det_doc, "id", f"detections[{k}]")),
            bbox=tuple(float(x) for x in _require(det_doc, "bbox", f"detections[{k}]")),
            box_score=float(_require(det_doc, "box_score", f"detections[{k}]")),
            class_scores=tuple(float(x) for x in _require(det_doc, "class_scores", f"detections[{k}]")),
        )
        det.validate((h, w), len(class_names), f"detections[{k}]")
        detections.append(det)
    ids = [d.detection_id for d in detections]
    if len(set(ids)) != len(ids):
        raise SchemaError("detections", "detection ids must be unique")

    superpixels = decode_raster(_require(doc, "superpixels", "scene"), "superpixels").astype(int)
    if superpixels.shape != (n_pixels,):
        raise SchemaError("superpixels", f"expected {n_pixels} labels, got {superpixels.shape}")
    labels = np.unique(superpixels)
    if labels.min() != 0 or labels.max() != len(labels) - 1:
        raise SchemaError("superpixels", "labels must be contiguous from 0")

    points = decode_raster(_require(doc, "points", "scene"), "points").astype(float)
    normals = decode_raster(_require(doc, "normals", "scene"), "normals").astype(float)
    for name, arr in (("points", points), ("normals", normals)):
        if arr.shape != (n_pixels, 3):
            raise SchemaError(name, f"expected shape ({n_pixels}, 3), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise SchemaError(name, "entries must be finite")

    lines = tuple(
        Line(tuple(float(x) for x in _require(ld, "direction", f"lines[{k}]")), ld.get("near_y"))
        for k, ld in enumerate(doc.get("lines", []))
    )

    scene_probs = np.asarray(_require(doc, "scene_probabilities", "scene"), dtype=float)
    if scene_probs.shape != (len(scene_names),):
        raise SchemaError("scene_probabilities", f"expected {len(scene_names)} entries, got {scene_probs.shape}")

    n = len(detections)
    support_probs = None
    support_features = None
    support_classifier = None
    support_doc = doc.get("support")
    if support_doc is not None:
        if "probabilities" in support_doc:
            support_probs = np.asarray(support_doc["probabilities"], dtype=float)
            if support_probs.shape != (n, n + 1, 3):
                raise SchemaError(
                    "support.probabilities", f"expected shape ({n}, {n + 1}, 3), got {support_probs.shape}"
                )
            sums = support_probs.sum(axis=2)
            for i in range(n):
                for j in range(n + 1):
                    if i == j:
                        continue
                    if abs(sums[i, j] - 1.0) > 1e-6:
                        raise SchemaError(
                            f"support.probabilities[{i}][{j}]", f"labels sum to {sums[i, j]}, not 1"
                        )
        elif "features" in support_doc:
            support_features = np.asarray(support_doc["features"], dtype=float)
            if support_features.shape != (n, n + 1, 20):
                raise SchemaError(
                    "support.features", f"expected shape ({n}, {n + 1}, 20), got {support_features.shape}"
                )
            support_classifier = _classifier_from_doc(
                _require(support_doc, "classifier", "support"), "support.classifier"
            )
        else:
            raise SchemaError("support", "must contain 'probabilities' or 'features'")

    rgb = None
    if "rgb" in doc:
        rgb = decode_raster(doc["rgb"], "rgb").astype(np.uint8)
        if rgb.shape != (n_pixels, 3):
            raise SchemaError("rgb", f"expected shape ({n_pixels}, 3), got {rgb.shape}")

    return SceneBundle(
        scene_id=scene_id,
        image_size=(h, w),
        detections=tuple(detections),
        superpixels=superpixels,
        points=points,
        normals=normals,
        lines=lines,
        scene_probabilities=scene_probs,
        class_names=class_names,
        scene_names=scene_names,
        support_probabilities=support_probs,
        support_features=support_features,
        support_classifier=support_classifier,
        rgb=rgb,
    )


def save_scene(bundle: SceneBundle, path: str | Path, rle: bool = True):
    doc: dict = {
        "schema": SCENE_SCHEMA,
        "scene_id": bundle.scene_id,
        "image_size": list(bundle.image_size),
        "classes": list(bundle.class_names),
        "scenes": list(bundle.scene_names),
        "detections": [
            {
                "id": d.detection_id,
                "bbox": list(d.bbox),
                "box_score": d.box_score,
                "class_scores": list(d.class_scores),
            }
            for d in bundle.detections
        ],
        "superpixels": encode_raster(bundle.superpixels, rle),
        "points": encode_raster(bundle.points, rle),
        "normals": encode_raster(bundle.normals, rle),
        "lines": [
            {"direction": list(l.direction), **({"near_y": l.near_y} if l.near_y is not None else {})}
            for l in bundle.lines
        ],
        "scene_probabilities": bundle.scene_probabilities.tolist(),
    }
    if bundle.support_probabilities is not None:
        doc["support"] = {"probabilities": bundle.support_probabilities.tolist()}
    elif bundle.support_features is not None:
        doc["support"] = {
            "features": bundle.support_features.tolist(),
            "classifier": {
                "weights": bundle.support_classifier.weights.tolist(),
                "bias": bundle.support_classifier.bias.tolist(),
            },
        }
    if bundle.rgb is not None:
        doc["rgb"] = encode_raster(bundle.rgb, rle)
    Path(path).write_text(json.dumps(doc))


# ---------------------------------------------------------------------------
# prior tables


def load_priors(path: str | Path) -> PriorTables:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(str(path), f"cannot parse priors file: {exc}") from exc
    if doc.get("schema") != PRIORS_SCHEMA:
        raise SchemaError("schema", f"expected {PRIORS_SCHEMA!r}, got {doc.get('schema')!r}")
    return PriorTables(
        class_names=tuple(str(c) for c in _require(doc, "classes", "priors")),
        scene_names=tuple(str(s) for s in _require(doc, "scenes", "priors")),
        class_given_scene=np.asarray(_require(doc, "class_given_scene", "priors"), dtype=float),
        support_prior=np.asarray(_require(doc, "support_prior", "priors"), dtype=float),
    )


def save_priors(priors: PriorTables, path: str | Path):
    doc = {
        "schema": PRIORS_SCHEMA,
        "classes": list(priors.class_names),
        "scenes": list(priors.scene_names),
        "class_given_scene": priors.class_given_scene.tolist(),
        "support_prior": priors.support_prior.tolist(),
    }
    Path(path).write_text(json.dumps(doc))


# ---------------------------------------------------------------------------
# scene graphs


def graph_to_doc(graph: SceneGraph) -> dict:
    return {
        "schema": GRAPH_SCHEMA,
        "scene_id": graph.scene_id,
        "scene_type": graph.scene_type,
        "vertices": [
            {
                "id": v.vertex_id,
                "kind": v.kind,
                "label": v.label,
                "bbox": list(v.bbox) if v.bbox is not None else None,
                "z_range": list(v.z_range) if v.z_range is not None else None,
                "attributes": sorted(v.attributes),
            }
            for v in graph.vertices
        ],
        "support_edges": sorted([list(e) for e in graph.support_edges]),
        "position_edges": sorted([list(e) for e in graph.position_edges]),
    }


def graph_from_doc(doc: dict) -> SceneGraph:
    if doc.get("schema") != GRAPH_SCHEMA:
        raise SchemaError("schema", f"expected {GRAPH_SCHEMA!r}, got {doc.get('schema')!r}")
    vertices = []
    for k, vd in enumerate(_require(doc, "vertices", "graph")):
        kind = _require(vd, "kind", f"vertices[{k}]")
        if kind not in ("root", "hidden", "object"):
            raise SchemaError(f"vertices[{k}].kind", f"unknown kind {kind!r}")
        vertices.append(
            GraphVertex(
                vertex_id=int(_require(vd, "id", f"vertices[{k}]")),
                kind=kind,
                label=str(_require(vd, "label", f"vertices[{k}]")),
                bbox=tuple(float(x) for x in vd["bbox"]) if vd.get("bbox") is not None else None,
                z_range=tuple(float(x) for x in vd["z_range"]) if vd.get("z_range") is not None else None,
                attributes=tuple(sorted(vd.get("attributes", []))),
            )
        )
    graph = SceneGraph(
        scene_id=str(_require(doc, "scene_id", "graph")),
        scene_type=str(_require(doc, "scene_type", "graph")),
        vertices=tuple(vertices),
        support_edges=frozenset(tuple(e) for e in doc.get("support_edges", [])),
        position_edges=frozenset((int(i), int(j), str(r)) for i, j, r in doc.get("position_edges", [])),
    )
    problems = validate_graph(graph)
    if problems:
        raise SchemaError("graph", "; ".join(problems))
    return graph


def save_graph(graph: SceneGraph, path: str | Path, fmt: str = "json"):
    """Write ``graph`` as JSON (lossless) or DOT (for rendering)."""
    problems = validate_graph(graph)
    if problems:
        raise ValueError("refusing to save invalid graph: " + "; ".join(problems))
    path = Path(path)
    if fmt == "json":
        path.write_text(json.dumps(graph_to_doc(graph), indent=1))
    elif fmt == "dot":
        path.write_text(graph_to_dot(graph))
    else:
        raise ValueError(f"unknown graph format {fmt!r}")


def load_graph(path: str | Path) -> SceneGraph:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(str(path), f"cannot parse graph file: {exc}") from exc
    return graph_from_doc(doc)


def graph_to_dot(graph: SceneGraph) -> str:
    """DOT text: solid arrows for support, dashed labelled arrows for position."""

    def esc(s: str) -> str:
        return s.replace('"', r"\"")

    lines = [f'digraph "{esc(graph.scene_id)}" {{', "  rankdir=BT;"]
    for v in graph.vertices:
        shape = {"root": "doubleoctagon", "hidden": "diamond"}.get(v.kind, "box")
        label = v.label
        if v.attributes:
            label += "\\n" + ",".join(v.attributes)
        lines.append(f'  v{v.vertex_id} [label="{esc(label)}" shape={shape}];')
    for vid in graph.root_adjacent_ids():
        lines.append(f"  v{vid} -> v{graph.root.vertex_id} [style=bold color=gray];")
    for child, parent in sorted(graph.support_edges):
        lines.append(f"  v{child} -> v{parent} [style=solid color=darkgreen];")
    for i, j, rel in sorted(graph.position_edges):
        lines.append(f'  v{i} -> v{j} [style=dashed color=blue label="{rel}" constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"
