"""Domain types shared by every stage of the pipeline.

All types are immutable value objects: construct once, share freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Structural classes are pinned to the head of every class vocabulary.
GROUND = "ground"
WALL = "wall"
CEILING = "ceiling"
STRUCTURAL_CLASSES = (GROUND, WALL, CEILING)
GROUND_INDEX = 0
WALL_INDEX = 1
CEILING_INDEX = 2

HIDDEN_LABEL = "hidden"

# Supporter sentinels used in assignments: a visible supporter is its object
# index, an undetected/invisible supporter is HIDDEN_SUPPORTER, and the
# ground supports itself.
HIDDEN_SUPPORTER = -1
GROUND_SELF = -2

SUPPORT_BELOW = 0
SUPPORT_BEHIND = 1
SUPPORT_NONE = 2
SUPPORT_TYPE_NAMES = ("below", "behind")

# Best-effort default object vocabulary: the three structural classes,
# 32 named indoor classes, and three catch-all classes.  Engine behaviour
# never depends on this particular list; scenes may ship their own.
DEFAULT_CLASSES = (
    GROUND,
    WALL,
    CEILING,
    "bed",
    "table",
    "chair",
    "sofa",
    "bookshelf",
    "television",
    "lamp",
    "pillow",
    "cabinet",
    "counter",
    "dresser",
    "shelves",
    "curtain",
    "picture",
    "mirror",
    "floor mat",
    "clothes",
    "books",
    "refrigerator",
    "toilet",
    "sink",
    "bathtub",
    "bag",
    "whiteboard",
    "person",
    "night stand",
    "box",
    "door",
    "window",
    "monitor",
    "paper",
    "towel",
    "other prop",
    "other furniture",
    "other structure",
)

DEFAULT_SCENES = (
    "bedroom",
    "kitchen",
    "living room",
    "bathroom",
    "dining room",
    "office",
    "home office",
    "classroom",
    "bookstore",
    "others",
)

COLOR_PALETTE = (
    ("red", (255, 0, 0)),
    ("green", (0, 255, 0)),
    ("blue", (0, 0, 255)),
    ("yellow", (255, 255, 0)),
    ("brown", (139, 69, 19)),
    ("black", (0, 0, 0)),
    ("white", (255, 255, 255)),
    ("gray", (128, 128, 128)),
)


class SchemaError(ValueError):
    """A document failed validation; ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Detection:
    """One detector proposal: a box, a confidence, and per-class scores."""

    detection_id: int
    bbox: tuple[float, float, float, float]  # (u0, v0, u1, v1)
    box_score: float
    class_scores: tuple[float, ...]

    @property
    def area(self) -> float:
        u0, v0, u1, v1 = self.bbox
        return (u1 - u0) * (v1 - v0)

    def best_class(self) -> int:
        """Index of the highest class score; ties take the lowest index."""
        return int(np.argmax(self.class_scores))

    def validate(self, image_size: tuple[int, int], n_classes: int, path: str = "detection"):
        u0, v0, u1, v1 = self.bbox
        h, w = image_size
        if self.detection_id < 0:
            raise SchemaError(f"{path}.id", "must be >= 0")
        if not (u0 < u1 and v0 < v1):
            raise SchemaError(f"{path}.bbox", f"degenerate box {self.bbox}")
        if u0 < 0 or v0 < 0 or u1 > w or v1 > h:
            raise SchemaError(f"{path}.bbox", f"{self.bbox} outside image {w}x{h}")
        if len(self.class_scores) != n_classes:
            raise SchemaError(
                f"{path}.class_scores",
                f"detection {self.detection_id} has {len(self.class_scores)} scores, vocabulary has {n_classes}",
            )


@dataclass(frozen=True)
class Line:
    """A straight 3D line direction extracted from the image."""

    direction: tuple[float, float, float]
    near_y: bool | None = None  # precomputed flag; None = decide by config threshold


@dataclass(frozen=True)
class ObjectRegion:
    """Point-cloud summary of one segmented object in aligned coordinates.

    ``points`` are the member pixels' aligned 3D coordinates and
    ``camera_depth`` their original (pre-alignment) camera Z, kept because
    several pairwise features need the raw point sets, not just extents.
    """

    detection_id: int
    pixels: np.ndarray            # flat raster indices, sorted
    points: np.ndarray            # (M, 3) aligned coordinates
    camera_depth: np.ndarray      # (M,) original camera Z
    horizontal_mask: np.ndarray   # (M,) bool, surface normal near +y
    vertical_mask: np.ndarray     # (M,) bool, surface normal near horizontal plane
    bounds: tuple[float, float, float, float, float, float]  # x/y/z min,max
    centroid: tuple[float, float, float]

    @property
    def h_bottom(self) -> float:
        return self.bounds[2]

    @property
    def h_top(self) -> float:
        return self.bounds[3]

    @property
    def n_pixels(self) -> int:
        return len(self.pixels)

    @property
    def n_horizontal(self) -> int:
        return int(self.horizontal_mask.sum())

    @property
    def n_vertical(self) -> int:
        return int(self.vertical_mask.sum())

    def footprint(self) -> np.ndarray:
        """Floor-plane (x, z) projection of the member points."""
        return self.points[:, [0, 2]]


@dataclass(frozen=True)
class SceneBundle:
    """Everything the engine ingests for one scene.

    Rasters are flat row-major arrays over ``image_size = (height, width)``.
    ``support_probabilities`` (when present) is (N, N+1, 3): the last
    supporter column is the hidden placeholder and the last axis is
    (below, behind, none).  ``support_features`` is the (N, N+1, 20)
    alternative scored through ``support_classifier``.
    """

    scene_id: str
    image_size: tuple[int, int]
    detections: tuple[Detection, ...]
    superpixels: np.ndarray       # (H*W,) int labels, contiguous from 0
    points: np.ndarray            # (H*W, 3)
    normals: np.ndarray           # (H*W, 3)
    lines: tuple[Line, ...]
    scene_probabilities: np.ndarray
    class_names: tuple[str, ...]
    scene_names: tuple[str, ...]
    support_probabilities: np.ndarray | None = None
    support_features: np.ndarray | None = None
    support_classifier: "LinearClassifier | None" = None
    rgb: np.ndarray | None = None  # (H*W, 3) uint8, optional

    @property
    def n_detections(self) -> int:
        return len(self.detections)


@dataclass(frozen=True)
class LinearClassifier:
    """Multinomial logistic regression weights: K classes over D features."""

    weights: np.ndarray  # (K, D)
    bias: np.ndarray     # (K,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ValueError(f"weights {w.shape} and bias {b.shape} do not agree")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ValueError("classifier parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)


@dataclass(frozen=True)
class PriorTables:
    """Class/scene vocabularies plus the two co-occurrence prior matrices.

    ``class_given_scene[c, s]`` is the probability of class ``c`` appearing
    in scene type ``s``; ``support_prior[u, c]`` the prior of class ``u``
    supporting class ``c`` (asymmetric).
    """

    class_names: tuple[str, ...]
    scene_names: tuple[str, ...]
    class_given_scene: np.ndarray
    support_prior: np.ndarray

    def __post_init__(self):
        cgs = np.asarray(self.class_given_scene, dtype=float)
        sp = np.asarray(self.support_prior, dtype=float)
        n_c, n_s = len(self.class_names), len(self.scene_names)
        if cgs.shape != (n_c, n_s):
            raise SchemaError("class_given_scene", f"shape {cgs.shape} != ({n_c}, {n_s})")
        if sp.shape != (n_c, n_c):
            raise SchemaError("support_prior", f"shape {sp.shape} != ({n_c}, {n_c})")
        for name, mat in (("class_given_scene", cgs), ("support_prior", sp)):
            if np.isnan(mat).any() or (mat < 0).any() or (mat > 1).any():
                raise SchemaError(name, "entries must lie in [0, 1]")
        for idx, cls in zip((GROUND_INDEX, WALL_INDEX, CEILING_INDEX), STRUCTURAL_CLASSES):
            if len(self.class_names) <= idx or self.class_names[idx] != cls:
                raise SchemaError("classes", f"index {idx} must be reserved for '{cls}'")
        object.__setattr__(self, "class_given_scene", cgs)
        object.__setattr__(self, "support_prior", sp)

    def class_index(self, name: str) -> int:
        return self.class_names.index(name)


def default_priors(
    class_names: tuple[str, ...] = DEFAULT_CLASSES,
    scene_names: tuple[str, ...] = DEFAULT_SCENES,
) -> PriorTables:
    """Hand-set demo priors (NOT trained on any dataset).

    Structure: every class is weakly plausible everywhere, the ground is a
    likely supporter of free-standing objects, and vertical structures
    support wall-mounted classes.
    """
    n = len(class_names)
    cgs = np.full((n, len(scene_names)), 0.5)
    cgs[GROUND_INDEX, :] = 0.95
    cgs[WALL_INDEX, :] = 0.95
    cgs[CEILING_INDEX, :] = 0.8
    thematic = {
        ("bed", "bedroom"): 0.9,
        ("table", "dining room"): 0.9,
        ("sofa", "living room"): 0.9,
        ("toilet", "bathroom"): 0.9,
        ("counter", "kitchen"): 0.9,
        ("books", "bookstore"): 0.9,
    }
    for (cls, scene), p in thematic.items():
        if cls in class_names and scene in scene_names:
            cgs[class_names.index(cls), scene_names.index(scene)] = p

    sp = np.full((n, n), 0.1)
    sp[GROUND_INDEX, :] = 0.6
    wall_mounted = ("picture", "mirror", "whiteboard", "television", "curtain", "window", "door")
    for cls in wall_mounted:
        if cls in class_names:
            sp[WALL_INDEX, class_names.index(cls)] = 0.7
    tabletop = ("books", "box", "monitor", "lamp", "paper", "bag", "other prop")
    for surface in ("table", "counter", "shelves", "night stand", "dresser"):
        if surface not in class_names:
            continue
        for cls in tabletop:
            if cls in class_names:
                sp[class_names.index(surface), class_names.index(cls)] = 0.6
    # nothing rests on the ceiling
    sp[CEILING_INDEX, :] = 0.02
    return PriorTables(tuple(class_names), tuple(scene_names), cgs, sp)


@dataclass(frozen=True)
class ObjectAssignment:
    """Supporter, support type, and class label inferred for one object.

    ``supporter`` is an object index, HIDDEN_SUPPORTER, or GROUND_SELF;
    ``support_type`` is SUPPORT_BELOW/SUPPORT_BEHIND, or None iff the
    object is the self-supported ground.
    """

    detection_id: int
    class_index: int
    supporter: int
    support_type: int | None

    def __post_init__(self):
        if (self.supporter == GROUND_SELF) != (self.support_type is None):
            raise ValueError("support_type must be None exactly for the self-supported ground")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Weighted contribution of each energy term; fields sum to the total."""

    support: float
    classification: float
    class_pair: float
    distance: float
    structural: float

    @property
    def total(self) -> float:
        return self.support + self.classification + self.class_pair + self.distance + self.structural


@dataclass(frozen=True)
class SupportSolution:
    """A complete joint assignment with its energy audit."""

    assignments: tuple[ObjectAssignment, ...]
    energy: float
    breakdown: EnergyBreakdown
    saturated: bool = False
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class GraphVertex:
    """Scene-graph vertex. ``kind`` is 'root', 'hidden', or 'object'."""

    vertex_id: int
    kind: str
    label: str
    bbox: tuple[float, float, float, float] | None = None
    z_range: tuple[float, float] | None = None
    attributes: tuple[str, ...] = ()

    def __post_init__(self):
        # canonical order keeps serialization round-trips exact
        object.__setattr__(self, "attributes", tuple(sorted(self.attributes)))

    def is_structural(self) -> bool:
        return self.kind == "object" and self.label in STRUCTURAL_CLASSES


@dataclass(frozen=True)
class SceneGraph:
    """Layered semantic scene graph.

    Support edges run supported -> supporter.  Position edges are directed
    statements "i is <relation> of j" and always come in mirrored pairs.
    Root adjacency (which vertices hang directly under the scene node) is
    rule-based: structural classes and the hidden vertex.
    """

    scene_id: str
    scene_type: str
    vertices: tuple[GraphVertex, ...]
    support_edges: frozenset[tuple[int, int]]
    position_edges: frozenset[tuple[int, int, str]]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.vertex_id)))
        object.__setattr__(self, "support_edges", frozenset(self.support_edges))
        object.__setattr__(self, "position_edges", frozenset(self.position_edges))

    def vertex(self, vertex_id: int) -> GraphVertex:
        for v in self.vertices:
            if v.vertex_id == vertex_id:
                return v
        raise KeyError(vertex_id)

    @property
    def root(self) -> GraphVertex:
        return next(v for v in self.vertices if v.kind == "root")

    @property
    def hidden(self) -> GraphVertex:
        return next(v for v in self.vertices if v.kind == "hidden")

    def object_vertices(self) -> tuple[GraphVertex, ...]:
        return tuple(v for v in self.vertices if v.kind == "object")

    def root_adjacent_ids(self) -> tuple[int, ...]:
        """Layer-one vertices: structural objects plus the hidden vertex."""
        ids = [v.vertex_id for v in self.vertices if v.is_structural()]
        ids.append(self.hidden.vertex_id)
        return tuple(sorted(ids))

    def supporter_of(self, vertex_id: int) -> int | None:
        for child, parent in self.support_edges:
            if child == vertex_id:
                return parent
        return None


POSITION_RELATIONS = ("above", "under", "front", "behind", "left", "right")
MIRROR_RELATION = {
    "above": "under",
    "under": "above",
    "front": "behind",
    "behind": "front",
    "left": "right",
    "right": "left",
}


def validate_graph(graph: SceneGraph) -> list[str]:
    """All invariant violations of ``graph``, empty when valid."""
    problems: list[str] = []
    ids = [v.vertex_id for v in graph.vertices]
    if len(set(ids)) != len(ids):
        problems.append("duplicate-vertex-id: vertex ids must be unique")
    roots = [v for v in graph.vertices if v.kind == "root"]
    hiddens = [v for v in graph.vertices if v.kind == "hidden"]
    if len(roots) != 1:
        problems.append(f"single-root: expected exactly one root vertex, found {len(roots)}")
    if len(hiddens) != 1:
        problems.append(f"single-hidden: expected exactly one hidden vertex, found {len(hiddens)}")
    if problems:
        return problems
    root_id = roots[0].vertex_id
    hidden_id = hiddens[0].vertex_id
    known = set(ids)

    out_count: dict[int, int] = {}
    for child, parent in graph.support_edges:
        if child not in known or parent not in known:
            problems.append(f"edge-endpoint: support edge ({child}, {parent}) references unknown vertex")
            continue
        if root_id in (child, parent):
            problems.append("root-support-free: the root vertex may not appear in support edges")
        if child == hidden_id:
            problems.append("hidden-unsupported: the hidden vertex may not be supported")
        out_count[child] = out_count.get(child, 0) + 1
    for v in graph.vertices:
        if v.kind != "object":
            continue
        n_out = out_count.get(v.vertex_id, 0)
        if n_out > 1:
            problems.append(
                f"single-supporter: vertex {v.vertex_id} ({v.label}) has {n_out} supporters"
            )
        elif n_out == 0 and not v.is_structural():
            problems.append(
                f"single-supporter: vertex {v.vertex_id} ({v.label}) has no supporter"
            )

    # support edges must form a forest: follow parents, detect cycles
    parent_of = {c: p for c, p in graph.support_edges}
    for v in graph.vertices:
        seen = set()
        node = v.vertex_id
        while node in parent_of:
            if node in seen:
                problems.append(f"acyclic-support: cycle through vertex {node}")
                break
            seen.add(node)
            node = parent_of[node]

    seen_pos = set(graph.position_edges)
    for i, j, rel in graph.position_edges:
        if rel not in POSITION_RELATIONS:
            problems.append(f"position-relation: unknown relation '{rel}'")
            continue
        if i not in known or j not in known:
            problems.append(f"edge-endpoint: position edge ({i}, {j}, {rel}) references unknown vertex")
            continue
        if root_id in (i, j) or hidden_id in (i, j):
            problems.append("position-objects-only: position edges may not touch root or hidden")
        if (j, i, MIRROR_RELATION[rel]) not in seen_pos:
            problems.append(f"position-mirrored: ({i}, {j}, {rel}) lacks its mirrored edge")
    return problems


@dataclass(frozen=True)
class SimilarityReport:
    """Distances between a hypothesis graph and a ground-truth graph."""

    cheeger_distance: float
    spectral_distance: float
    naive_distance: float
    flags: tuple[str, ...] = ()
