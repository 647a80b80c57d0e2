#!/usr/bin/env python3
"""Regenerate the committed demo fixtures.

Builds two synthetic scenes (a seven-object dining room and a four-object
desk), their shared prior tables, and the hand-built kitchen ground-truth /
erroneous-hypothesis graph pair used by the evaluation demos.  Everything
is deterministic; run from the repo root:

    python scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from supportgraph import sceneio
from supportgraph.model import (
    Detection,
    GraphVertex,
    PriorTables,
    SceneBundle,
    SceneGraph,
    DEFAULT_SCENES,
)

FIXTURES = REPO / "fixtures"

CLASSES = ("ground", "wall", "ceiling", "table", "sofa", "picture", "cup", "book", "other prop")
SCENES = DEFAULT_SCENES

COLORS = {
    "wall": (235, 235, 235),
    "ground": (128, 128, 128),
    "sofa": (200, 30, 30),
    "table": (139, 69, 19),
    "picture": (40, 60, 220),
    "cup": (30, 200, 30),
    "book": (230, 220, 30),
}


def class_scores(best: str, score: float = 0.9) -> list[float]:
    rest = (1.0 - score) / (len(CLASSES) - 1)
    return [score if c == best else rest for c in CLASSES]


def make_priors() -> PriorTables:
    n = len(CLASSES)
    cgs = np.full((n, len(SCENES)), 0.7)
    sp = np.full((n, n), 0.05)
    idx = {c: k for k, c in enumerate(CLASSES)}
    sp[idx["ground"], :] = 0.6
    sp[idx["ground"], idx["table"]] = 0.8
    sp[idx["ground"], idx["sofa"]] = 0.8
    sp[idx["wall"], idx["picture"]] = 0.8
    sp[idx["table"], idx["cup"]] = 0.8
    sp[idx["table"], idx["book"]] = 0.8
    sp[idx["ceiling"], :] = 0.02
    return PriorTables(CLASSES, SCENES, cgs, sp)


def paint(grid: np.ndarray, rows: range, cols: range, value: int):
    for r in rows:
        for c in cols:
            grid[r, c] = value


def make_fig5_scene() -> SceneBundle:
    """Seven-object dining room: sofa and table on the ground, a picture on
    the wall, cup and book on the table, plus one duplicate table proposal
    for the NMS stage to remove."""
    h, w = 24, 32
    x_of = lambda col: (col - 16) * 0.1
    # superpixel regions painted over a wall/ground background
    sp = np.zeros((h, w), dtype=int)
    paint(sp, range(0, 14), range(0, 32), 0)    # wall
    paint(sp, range(14, 24), range(0, 32), 1)   # ground
    paint(sp, range(10, 18), range(2, 10), 2)   # sofa
    paint(sp, range(12, 19), range(14, 24), 3)  # table
    paint(sp, range(2, 7), range(4, 9), 4)      # picture
    paint(sp, range(9, 13), range(15, 18), 5)   # cup
    paint(sp, range(10, 13), range(19, 23), 6)  # book

    points = np.zeros((h, w, 3))
    normals = np.zeros((h, w, 3))
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    up = (0.0, 1.0, 0.0)
    toward = (0.0, 0.0, -1.0)

    for r in range(h):
        for c in range(w):
            label = sp[r, c]
            x = x_of(c)
            if label == 0:  # wall plane z = 3
                points[r, c] = (x, 2.4 - r * 0.1, 3.0)
                normals[r, c] = toward
                rgb[r, c] = COLORS["wall"]
            elif label == 1:  # floor plane y = 0
                points[r, c] = (x, 0.0, 2.8 - (r - 14) * 0.2)
                normals[r, c] = up
                rgb[r, c] = COLORS["ground"]
            elif label == 2:  # sofa: top rows horizontal, lower rows front face
                if r <= 13:
                    points[r, c] = (x, 0.65, 2.4 - (r - 10) * 0.15)
                    normals[r, c] = up
                else:
                    points[r, c] = (x, 0.65 - (r - 13) * 0.15, 1.95)
                    normals[r, c] = toward
                rgb[r, c] = COLORS["sofa"]
            elif label == 3:  # table
                if r <= 14:
                    points[r, c] = (x, 0.75, 2.2 - (r - 12) * 0.15)
                    normals[r, c] = up
                else:
                    points[r, c] = (x, 0.75 - (r - 14) * 0.175, 1.75)
                    normals[r, c] = toward
                rgb[r, c] = COLORS["table"]
            elif label == 4:  # picture just off the wall
                points[r, c] = (x, 2.4 - r * 0.1, 2.95)
                normals[r, c] = toward
                rgb[r, c] = COLORS["picture"]
            elif label == 5:  # cup standing on the tabletop
                points[r, c] = (x, 0.95 - (r - 9) * 0.0667, 2.0)
                normals[r, c] = up if r == 9 else toward
                rgb[r, c] = COLORS["cup"]
            elif label == 6:  # book lying flat on the tabletop
                points[r, c] = (x, 0.80 - (r - 10) * 0.02, 2.1 - (r - 10) * 0.1)
                normals[r, c] = up
                rgb[r, c] = COLORS["book"]

    detections = [
        Detection(0, (0, 0, 32, 14), 0.9, tuple(class_scores("wall"))),
        Detection(1, (0, 14, 32, 24), 0.9, tuple(class_scores("ground"))),
        Detection(2, (2, 10, 10, 18), 0.85, tuple(class_scores("sofa"))),
        Detection(3, (14, 12, 24, 19), 0.85, tuple(class_scores("table"))),
        Detection(4, (4, 2, 9, 7), 0.85, tuple(class_scores("picture"))),
        Detection(5, (15, 9, 18, 13), 0.8, tuple(class_scores("cup"))),
        Detection(6, (19, 10, 23, 13), 0.8, tuple(class_scores("book"))),
        # overlapping duplicate of the table with a lower score: NMS food
        Detection(7, (14, 12, 25, 20), 0.4, tuple(class_scores("table", 0.6))),
    ]

    n = len(detections)
    probs = np.tile(np.array([0.05, 0.05, 0.90]), (n, n + 1, 1))
    strong_below = np.array([0.85, 0.05, 0.10])
    strong_behind = np.array([0.05, 0.85, 0.10])
    pairs_below = [(2, 1), (3, 1), (5, 3), (6, 3), (0, 1), (7, 1)]
    for i, j in pairs_below:
        probs[i, j] = strong_below
    probs[4, 0] = strong_behind              # picture hangs on the wall
    probs[:, n] = np.array([0.10, 0.10, 0.80])  # hidden column
    for i in range(n):
        probs[i, i] = np.array([0.0, 0.0, 1.0])

    scene_probs = np.full(len(SCENES), 0.015)
    scene_probs[SCENES.index("dining room")] = 1.0 - 0.015 * (len(SCENES) - 1)

    lines = [
        {"direction": (0.05, 0.998749, 0.0)},
        {"direction": (0.0, 1.0, 0.0)},
        {"direction": (1.0, 0.0, 0.0)},
        {"direction": (0.0, 0.0, 1.0)},
    ]
    from supportgraph.model import Line

    return SceneBundle(
        scene_id="fig5",
        image_size=(h, w),
        detections=tuple(detections),
        superpixels=sp.ravel(),
        points=points.reshape(-1, 3),
        normals=normals.reshape(-1, 3),
        lines=tuple(Line(tuple(l["direction"])) for l in lines),
        scene_probabilities=scene_probs,
        class_names=CLASSES,
        scene_names=SCENES,
        support_probabilities=probs,
        rgb=rgb.reshape(-1, 3),
    )


def make_desk_scene() -> SceneBundle:
    """Four-object desk scene, small enough for the exhaustive oracle."""
    h, w = 16, 20
    x_of = lambda col: (col - 10) * 0.1
    sp = np.full((h, w), 4, dtype=int)         # background wall fills the top
    paint(sp, range(8, 16), range(0, 20), 0)   # ground
    paint(sp, range(4, 11), range(4, 16), 1)   # table
    paint(sp, range(1, 5), range(5, 8), 2)     # cup
    paint(sp, range(2, 5), range(10, 14), 3)   # book

    points = np.zeros((h, w, 3))
    normals = np.zeros((h, w, 3))
    up = (0.0, 1.0, 0.0)
    toward = (0.0, 0.0, -1.0)
    for r in range(h):
        for c in range(w):
            label = sp[r, c]
            x = x_of(c)
            if label == 0:
                points[r, c] = (x, 0.0, 2.4 - (r - 8) * 0.2)
                normals[r, c] = up
            elif label == 1:
                if r <= 6:
                    points[r, c] = (x, 0.72, 1.9 - (r - 4) * 0.1)
                    normals[r, c] = up
                else:
                    points[r, c] = (x, 0.72 - (r - 6) * 0.17, 1.6)
                    normals[r, c] = toward
            elif label == 2:
                points[r, c] = (x, 0.95 - (r - 1) * 0.0767, 1.8)
                normals[r, c] = up if r == 1 else toward
            elif label == 3:
                points[r, c] = (x, 0.78 - (r - 2) * 0.02, 1.75 - (r - 2) * 0.05)
                normals[r, c] = up
            else:  # far background wall-ish points, unlabeled
                points[r, c] = (x, 2.0 - r * 0.1, 3.0)
                normals[r, c] = toward

    detections = [
        Detection(0, (0, 8, 20, 16), 0.9, tuple(class_scores("ground"))),
        Detection(1, (4, 4, 16, 11), 0.85, tuple(class_scores("table"))),
        Detection(2, (5, 1, 8, 5), 0.8, tuple(class_scores("cup"))),
        Detection(3, (10, 2, 14, 5), 0.8, tuple(class_scores("book"))),
    ]
    n = len(detections)
    probs = np.tile(np.array([0.05, 0.05, 0.90]), (n, n + 1, 1))
    strong_below = np.array([0.85, 0.05, 0.10])
    for i, j in [(1, 0), (2, 1), (3, 1)]:
        probs[i, j] = strong_below
    probs[:, n] = np.array([0.10, 0.10, 0.80])
    for i in range(n):
        probs[i, i] = np.array([0.0, 0.0, 1.0])

    scene_probs = np.full(len(SCENES), 0.04)
    scene_probs[SCENES.index("office")] = 1.0 - 0.04 * (len(SCENES) - 1)

    from supportgraph.model import Line

    return SceneBundle(
        scene_id="desk",
        image_size=(h, w),
        detections=tuple(detections),
        superpixels=sp.ravel(),
        points=points.reshape(-1, 3),
        normals=normals.reshape(-1, 3),
        lines=(Line((0.0, 1.0, 0.0)),),
        scene_probabilities=scene_probs,
        class_names=CLASSES,
        scene_names=SCENES,
        support_probabilities=probs,
    )


def make_kitchen_graphs() -> tuple[SceneGraph, SceneGraph]:
    """Hand-built kitchen ground truth and a hypothesis with one error
    (table hung on the wall instead of standing on the ground)."""

    def vertices():
        return (
            GraphVertex(0, "root", "kitchen"),
            GraphVertex(1, "hidden", "hidden"),
            GraphVertex(2, "object", "ground"),
            GraphVertex(3, "object", "wall"),
            GraphVertex(4, "object", "table"),
            GraphVertex(5, "object", "chair"),
            GraphVertex(6, "object", "picture"),
            GraphVertex(7, "object", "cup"),
            GraphVertex(8, "object", "book"),
        )

    gt = SceneGraph(
        scene_id="kitchen-demo",
        scene_type="kitchen",
        vertices=vertices(),
        support_edges=frozenset({(4, 2), (5, 2), (6, 3), (7, 4), (8, 4)}),
        position_edges=frozenset(),
    )
    err = SceneGraph(
        scene_id="kitchen-demo",
        scene_type="kitchen",
        vertices=vertices(),
        support_edges=frozenset({(4, 3), (5, 2), (6, 3), (7, 4), (8, 4)}),
        position_edges=frozenset(),
    )
    return gt, err


def main():
    (FIXTURES / "scenes").mkdir(parents=True, exist_ok=True)
    (FIXTURES / "priors").mkdir(parents=True, exist_ok=True)
    (FIXTURES / "graphs").mkdir(parents=True, exist_ok=True)

    sceneio.save_priors(make_priors(), FIXTURES / "priors" / "demo_priors.json")
    sceneio.save_scene(make_fig5_scene(), FIXTURES / "scenes" / "fig5.json")
    sceneio.save_scene(make_desk_scene(), FIXTURES / "scenes" / "desk.json")
    gt, err = make_kitchen_graphs()
    sceneio.save_graph(gt, FIXTURES / "graphs" / "kitchen_gt.json")
    sceneio.save_graph(err, FIXTURES / "graphs" / "kitchen_err.json")
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    main()
