#!/usr/bin/env python3
"""Record checksums of the committed scene fixtures.

Loads each fixture scene and writes a sha256 digest per field into
fixtures/manifest.json.  The digests freeze the loader's view of the
golden files: any accidental change to a fixture or a loader regression
shows up as a checksum mismatch in the test suite.

    python scripts/make_fixture_manifest.py          # rewrite the manifest
    python scripts/make_fixture_manifest.py --check  # verify, exit 1 on drift
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from supportgraph import sceneio

FIXTURES = REPO / "fixtures"


def canonical_checksums(bundle) -> dict:
    def digest(value) -> str:
        if isinstance(value, np.ndarray):
            payload = json.dumps(np.asarray(value, dtype=float).tolist())
        else:
            payload = json.dumps(value, sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()

    return {
        "scene_id": digest(bundle.scene_id),
        "image_size": digest(list(bundle.image_size)),
        "detections": digest(
            [[d.detection_id, list(d.bbox), d.box_score, list(d.class_scores)] for d in bundle.detections]
        ),
        "superpixels": digest(bundle.superpixels),
        "points": digest(bundle.points),
        "normals": digest(bundle.normals),
        "scene_probabilities": digest(bundle.scene_probabilities),
        "support_probabilities": digest(bundle.support_probabilities)
        if bundle.support_probabilities is not None
        else None,
    }


def build_manifest() -> dict:
    scenes = {}
    for path in sorted((FIXTURES / "scenes").glob("*.json")):
        scenes[path.stem] = canonical_checksums(sceneio.load_scene(path))
    return {"schema": "manifest/v1", "scenes": scenes}


def main() -> int:
    manifest_path = FIXTURES / "manifest.json"
    manifest = build_manifest()
    if "--check" in sys.argv:
        recorded = json.loads(manifest_path.read_text())
        if recorded != manifest:
            print("manifest drift detected", file=sys.stderr)
            return 1
        print("manifest ok")
        return 0
    manifest_path.write_text(json.dumps(manifest, indent=1))
    print(f"wrote {manifest_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
