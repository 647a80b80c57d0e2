"""Probabilistic scoring plumbing: logistic classifiers, priors, colors."""

from __future__ import annotations

import numpy as np

from .model import COLOR_PALETTE, LinearClassifier, SceneBundle


def softmax_predict(clf: LinearClassifier, features: np.ndarray) -> np.ndarray:
    """Class probabilities softmax(W f + b); strictly positive, sums to 1."""
    features = np.asarray(features, dtype=float)
    if features.shape != (clf.weights.shape[1],):
        raise ValueError(
            f"feature dimension {features.shape} does not match classifier D={clf.weights.shape[1]}"
        )
    scores = clf.weights @ features + clf.bias
    scores -= scores.max()
    e = np.exp(scores)
    return e / e.sum()


def support_probabilities(
    bundle: SceneBundle,
    features: np.ndarray | None = None,
    classifier: LinearClassifier | None = None,
) -> np.ndarray:
    """Support-label tensor p[i, j, y] over ordered pairs plus the hidden column.

    Shape (N, N+1, 3): j == N is the hidden supporter, y indexes
    (below, behind, none).  Precomputed probabilities in the bundle pass
    through unchanged (the tensor is asymmetric by construction and is
    never symmetrized); otherwise per-pair feature vectors are scored with
    the logistic classifier.
    """
    if bundle.support_probabilities is not None:
        return bundle.support_probabilities
    feats = features if features is not None else bundle.support_features
    clf = classifier if classifier is not None else bundle.support_classifier
    if feats is None or clf is None:
        raise ValueError("bundle has neither support probabilities nor features+classifier")
    n = bundle.n_detections
    feats = np.asarray(feats, dtype=float)
    if feats.shape[:2] != (n, n + 1):
        raise ValueError(f"support features must cover ({n}, {n + 1}) ordered pairs, got {feats.shape}")
    out = np.zeros((n, n + 1, 3))
    for i in range(n):
        for j in range(n + 1):
            if i == j:
                continue
            out[i, j] = softmax_predict(clf, feats[i, j])
    return out


def scene_posterior(bundle: SceneBundle) -> tuple[int, np.ndarray]:
    """Most probable scene type and the full score vector. Ties take the
    first scene in vocabulary order."""
    probs = np.asarray(bundle.scene_probabilities, dtype=float)
    return int(np.argmax(probs)), probs


def color_attributes(pixel_indices: np.ndarray, rgb: np.ndarray | None) -> tuple[str, ...]:
    """Nearest palette color of the region's mean RGB; empty when no image."""
    if rgb is None:
        return ()
    pixel_indices = np.asarray(pixel_indices, dtype=int)
    if pixel_indices.size == 0:
        raise ValueError("cannot label an empty region")
    mean = np.asarray(rgb, dtype=float)[pixel_indices].mean(axis=0)
    prototypes = np.array([c for _, c in COLOR_PALETTE], dtype=float)
    dists = np.linalg.norm(prototypes - mean, axis=1)
    return (COLOR_PALETTE[int(np.argmin(dists))][0],)
