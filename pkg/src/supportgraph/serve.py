"""Local JSON service: scene browsing, ground-truth editing, comparison.

Endpoints (all JSON):

  GET  /api/scenes                          scene listing
  GET  /api/scenes/{id}                     detections, vocab, image (PNG base64)
  GET  /api/scenes/{id}/graph               stored ground-truth graph + version
  PUT  /api/scenes/{id}/graph               validated save (expects {version, graph})
  POST /api/scenes/{id}/infer               run inference, return hypothesis graph
  GET  /api/scenes/{id}/compare             measures between hypothesis and ground truth

Saves are validated against the graph invariants before anything touches
disk; an invalid graph is rejected with 422 naming the violated invariant.
Concurrent writes per scene are serialized; each save bumps a version
counter and a stale ``version`` in the request is rejected with 409.
"""

from __future__ import annotations

import base64
import io
import json
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from . import graph_eval, pipeline, sceneio
from .config import EngineConfig
from .model import SceneGraph, SchemaError, validate_graph


def _png_base64(rgb, image_size) -> str | None:
    try:
        from PIL import Image
    except ImportError:
        return None
    h, w = image_size
    img = Image.fromarray(rgb.reshape(h, w, 3), "RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


class SceneStore:
    """Scene documents plus per-scene ground-truth graphs with versions."""

    def __init__(self, scenes_dir: Path, graphs_dir: Path):
        self.scenes_dir = Path(scenes_dir)
        self.graphs_dir = Path(graphs_dir)
        if not self.scenes_dir.is_dir():
            raise FileNotFoundError(f"scenes directory {self.scenes_dir} does not exist")
        self.graphs_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._versions: dict[str, int] = {}
        self._global = threading.Lock()

    def scene_ids(self) -> list[str]:
        return sorted(p.stem for p in self.scenes_dir.glob("*.json"))

    def scene_path(self, scene_id: str) -> Path:
        path = self.scenes_dir / f"{scene_id}.json"
        if not path.exists():
            raise KeyError(scene_id)
        return path

    def graph_path(self, scene_id: str) -> Path:
        return self.graphs_dir / f"{scene_id}.graph.json"

    def lock(self, scene_id: str) -> threading.Lock:
        with self._global:
            return self._locks.setdefault(scene_id, threading.Lock())

    def version(self, scene_id: str) -> int:
        return self._versions.get(scene_id, 0)

    def bump(self, scene_id: str) -> int:
        self._versions[scene_id] = self.version(scene_id) + 1
        return self._versions[scene_id]


def create_app(
    scenes_dir: Path,
    graphs_dir: Path,
    priors_path: Path,
    config: EngineConfig = EngineConfig(),
    frontend_dir: Path | None = None,
) -> FastAPI:
    store = SceneStore(scenes_dir, graphs_dir)
    priors = sceneio.load_priors(priors_path)
    app = FastAPI(title="supportgraph annotation service")

    def load_bundle(scene_id: str):
        try:
            return sceneio.load_scene(store.scene_path(scene_id))
        except KeyError:
            raise HTTPException(404, f"unknown scene {scene_id!r}")
        except SchemaError as exc:
            raise HTTPException(500, f"stored scene is invalid: {exc}")

    @app.get("/api/scenes")
    def list_scenes():
        out = []
        for scene_id in store.scene_ids():
            out.append(
                {
                    "scene_id": scene_id,
                    "has_ground_truth": store.graph_path(scene_id).exists(),
                }
            )
        return out

    @app.get("/api/scenes/{scene_id}")
    def get_scene(scene_id: str):
        bundle = load_bundle(scene_id)
        return {
            "scene_id": bundle.scene_id,
            "image_size": list(bundle.image_size),
            "classes": list(bundle.class_names),
            "scenes": list(bundle.scene_names),
            "detections": [
                {
                    "id": d.detection_id,
                    "bbox": list(d.bbox),
                    "box_score": d.box_score,
                    "best_class": bundle.class_names[d.best_class()],
                }
                for d in bundle.detections
            ],
            "image_png": _png_base64(bundle.rgb, bundle.image_size) if bundle.rgb is not None else None,
        }

    @app.get("/api/scenes/{scene_id}/graph")
    def get_graph(scene_id: str):
        load_bundle(scene_id)  # 404 for unknown scenes
        path = store.graph_path(scene_id)
        if not path.exists():
            raise HTTPException(404, f"no ground-truth graph for {scene_id!r}")
        graph = sceneio.load_graph(path)
        return {"version": store.version(scene_id), "graph": sceneio.graph_to_doc(graph)}

    @app.put("/api/scenes/{scene_id}/graph")
    def put_graph(scene_id: str, payload: dict):
        load_bundle(scene_id)
        if "graph" not in payload:
            raise HTTPException(422, "payload must be {version, graph}")
        try:
            graph = sceneio.graph_from_doc(payload["graph"])
        except SchemaError as exc:
            return JSONResponse(status_code=422, content={"detail": str(exc)})
        problems = validate_graph(graph)
        if problems:
            return JSONResponse(status_code=422, content={"detail": "; ".join(problems)})
        with store.lock(scene_id):
            expected = payload.get("version")
            current = store.version(scene_id)
            if expected is not None and expected != current:
                raise HTTPException(409, f"stale version {expected}, current is {current}")
            sceneio.save_graph(graph, store.graph_path(scene_id), "json")
            version = store.bump(scene_id)
        return {"version": version}

    @app.post("/api/scenes/{scene_id}/infer")
    def infer(scene_id: str):
        bundle = load_bundle(scene_id)
        try:
            result = pipeline.run_inference(bundle, priors, config)
        except ValueError as exc:
            raise HTTPException(500, f"inference failed: {exc}")
        graph = pipeline.result_to_graph(result, config)
        return {
            "graph": sceneio.graph_to_doc(graph),
            "energy": result.solution.energy,
            "scene_type": result.scene_type,
        }

    @app.get("/api/scenes/{scene_id}/compare")
    def compare(scene_id: str):
        bundle = load_bundle(scene_id)
        path = store.graph_path(scene_id)
        if not path.exists():
            raise HTTPException(404, f"no ground-truth graph for {scene_id!r}")
        gt = sceneio.load_graph(path)
        result = pipeline.run_inference(bundle, priors, config)
        hyp = pipeline.result_to_graph(result, config)
        try:
            report = graph_eval.compare_graphs(hyp, gt)
        except ValueError as exc:
            raise HTTPException(422, f"graphs cannot be compared: {exc}")
        return {
            "cheeger": report.cheeger_distance,
            "spectral": report.spectral_distance,
            "naive": report.naive_distance,
            "flags": list(report.flags),
            "hypothesis": sceneio.graph_to_doc(hyp),
            "ground_truth": sceneio.graph_to_doc(gt),
        }

    @app.get("/api/compare-graphs")
    def compare_files(hypothesis: str, ground_truth: str):
        """Compare two stored graph files by name (for fixtures/demos)."""
        try:
            hyp = sceneio.load_graph(store.graphs_dir / hypothesis)
            gt = sceneio.load_graph(store.graphs_dir / ground_truth)
        except (OSError, SchemaError) as exc:
            raise HTTPException(404, f"cannot load graphs: {exc}")
        try:
            report = graph_eval.compare_graphs(hyp, gt)
        except ValueError as exc:
            raise HTTPException(422, f"graphs cannot be compared: {exc}")
        return {
            "cheeger": report.cheeger_distance,
            "spectral": report.spectral_distance,
            "naive": report.naive_distance,
            "flags": list(report.flags),
        }

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="frontend")
    return app
