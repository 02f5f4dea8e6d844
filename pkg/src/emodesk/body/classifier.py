"""Six-basic-emotion nearest-centroid classifier over body features.

Features are z-scaled with statistics fit on the whole training set; each
emotion's centroid is the mean scaled vector of its examples.  Confidence is
d2 / (d1 + d2) for the two nearest centroids: 0.5 when ambiguous, 1 when the
query sits on a centroid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..emotionml import AVPoint
from ..platform.vocabulary import DEFAULT_VOCABULARY, EmotionVocabulary
from .features import BodyFeatures

BASIC_EMOTIONS = ("anger", "disgust", "fear", "happiness", "sadness", "surprise")

# classifier labels -> platform vocabulary labels
BASIC_TO_VOCABULARY = {
    "happiness": "happy",
    "anger": "angry",
    "sadness": "sad",
    "disgust": "disgusted",
    "fear": "afraid",
    "surprise": "surprised",
}


class ClassifierError(Exception):
    pass


class MissingLabel(ClassifierError):
    """A basic emotion has no training example."""


class UntrainedModel(ClassifierError):
    """Classification attempted without a trained model."""


@dataclass(frozen=True)
class EmotionCentroidModel:
    labels: tuple[str, ...]
    centroids: np.ndarray  # (6, n_features), scaled space
    feature_mean: np.ndarray
    feature_scale: np.ndarray

    def scale(self, vector: np.ndarray) -> np.ndarray:
        return (np.asarray(vector, dtype=np.float64) - self.feature_mean) / self.feature_scale


def train_centroids(labeled: Iterable[tuple[str, BodyFeatures]]) -> EmotionCentroidModel:
    """Fit scaling and per-emotion centroids from (label, features) pairs."""
    by_label: dict[str, list[np.ndarray]] = {label: [] for label in BASIC_EMOTIONS}
    everything: list[np.ndarray] = []
    for label, features in labeled:
        if label not in by_label:
            raise ClassifierError(f"unknown emotion label {label!r}")
        vector = features.as_vector()
        by_label[label].append(vector)
        everything.append(vector)
    missing = [label for label, rows in by_label.items() if not rows]
    if missing:
        raise MissingLabel(f"no training traces for: {', '.join(missing)}")

    stacked = np.vstack(everything)
    mean = stacked.mean(axis=0)
    scale = stacked.std(axis=0)
    scale[scale == 0.0] = 1.0

    centroids = np.vstack(
        [np.mean((np.vstack(by_label[label]) - mean) / scale, axis=0) for label in BASIC_EMOTIONS]
    )
    return EmotionCentroidModel(
        labels=BASIC_EMOTIONS,
        centroids=centroids,
        feature_mean=mean,
        feature_scale=scale,
    )


def classify(
    features: BodyFeatures,
    model: EmotionCentroidModel | None,
    vocabulary: EmotionVocabulary = DEFAULT_VOCABULARY,
) -> tuple[str, float, AVPoint]:
    """Nearest centroid in scaled space; ties go to the smallest label."""
    if model is None or len(model.labels) == 0:
        raise UntrainedModel("no centroid model available")
    scaled = model.scale(features.as_vector())
    distances = np.linalg.norm(model.centroids - scaled, axis=1)
    order = np.argsort(distances, kind="stable")  # labels are sorted, so ties stay lexicographic
    d1 = float(distances[order[0]])
    d2 = float(distances[order[1]]) if len(order) > 1 else d1
    confidence = 0.5 if d1 + d2 == 0.0 else d2 / (d1 + d2)
    label = model.labels[order[0]]
    point = vocabulary.canonical_point(BASIC_TO_VOCABULARY[label])
    return label, float(confidence), point
