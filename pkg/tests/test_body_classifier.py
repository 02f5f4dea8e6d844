import numpy as np
import pytest

from emodesk.body import io as body_io
from emodesk.body.classifier import (
    BASIC_EMOTIONS,
    BASIC_TO_VOCABULARY,
    EmotionCentroidModel,
    MissingLabel,
    UntrainedModel,
    classify,
    train_centroids,
)
from emodesk.body.features import FEATURE_NAMES, BodyFeatures
from emodesk.platform.vocabulary import DEFAULT_VOCABULARY

N = len(FEATURE_NAMES)


def features_from(vector) -> BodyFeatures:
    return BodyFeatures.from_vector(np.asarray(vector, dtype=float))


def random_features(rng) -> BodyFeatures:
    return features_from(rng.uniform(-1.0, 1.0, size=N))


def training_set(rng, per_label=1, spread=0.0):
    pairs = []
    means = {}
    for label in BASIC_EMOTIONS:
        mean = rng.uniform(-5.0, 5.0, size=N)
        means[label] = mean
        for _ in range(per_label):
            pairs.append((label, features_from(mean + spread * rng.normal(size=N))))
    return pairs, means


def test_single_trace_per_label_centroid_is_that_trace(rng):
    pairs, _ = training_set(rng)
    model = train_centroids(pairs)
    for label, feats in pairs:
        scaled = model.scale(feats.as_vector())
        row = model.centroids[model.labels.index(label)]
        np.testing.assert_allclose(row, scaled, atol=1e-12)


def test_duplicated_training_set_gives_identical_model(rng):
    pairs, _ = training_set(rng, per_label=3, spread=0.3)
    once = train_centroids(pairs)
    twice = train_centroids(pairs + pairs)
    np.testing.assert_allclose(once.centroids, twice.centroids, atol=1e-12)
    np.testing.assert_allclose(once.feature_mean, twice.feature_mean, atol=1e-12)
    np.testing.assert_allclose(once.feature_scale, twice.feature_scale, atol=1e-12)


def test_well_separated_clusters_recover_generating_means(rng):
    pairs, means = training_set(rng, per_label=20, spread=0.2)
    model = train_centroids(pairs)
    for label, mean in means.items():
        got = model.centroids[model.labels.index(label)]
        expected = model.scale(mean)
        assert np.linalg.norm(got - expected) < 0.1  # scaled units


def test_missing_label():
    pairs = [("anger", features_from(np.zeros(N)))]
    with pytest.raises(MissingLabel):
        train_centroids(pairs)


def test_unknown_label_rejected():
    with pytest.raises(Exception):
        train_centroids([("glee", features_from(np.zeros(N)))])


def test_untrained_model():
    with pytest.raises(UntrainedModel):
        classify(features_from(np.zeros(N)), None)


def test_classify_centroid_exactly(rng):
    pairs, means = training_set(rng, per_label=5, spread=0.1)
    model = train_centroids(pairs)
    raw = model.feature_mean + model.centroids[model.labels.index("anger")] * model.feature_scale
    label, confidence, point = classify(features_from(raw), model)
    assert label == "anger"
    assert confidence == 1.0  # d1 = 0 with distinct centroids
    assert point == DEFAULT_VOCABULARY.canonical_point("angry")


def test_classify_equidistant_tie():
    centroids = np.zeros((6, N))
    centroids[0, 0] = 1.0  # anger
    centroids[1, 0] = -1.0  # disgust
    centroids[2:, 1] = np.arange(4)[:, None][:, 0] + 5.0
    model = EmotionCentroidModel(
        labels=BASIC_EMOTIONS,
        centroids=centroids,
        feature_mean=np.zeros(N),
        feature_scale=np.ones(N),
    )
    label, confidence, _ = classify(features_from(np.zeros(N)), model)
    assert label == "anger"  # lexicographically first among the tied pair
    assert confidence == 0.5


def test_classify_maps_labels_to_vocabulary_points(rng):
    pairs, _ = training_set(rng, per_label=2, spread=0.1)
    model = train_centroids(pairs)
    for label in BASIC_EMOTIONS:
        raw = model.feature_mean + model.centroids[model.labels.index(label)] * model.feature_scale
        got_label, _, point = classify(features_from(raw), model)
        assert got_label == label
        assert point == DEFAULT_VOCABULARY.canonical_point(BASIC_TO_VOCABULARY[label])


def brute_force_label(model, features):
    scaled = model.scale(features.as_vector())
    best = None
    for label, centroid in zip(model.labels, model.centroids):
        d = float(np.sqrt(((centroid - scaled) ** 2).sum()))
        if best is None or d < best[0] or (d == best[0] and label < best[1]):
            best = (d, label)
    return best[1]


def test_classify_agrees_with_brute_force_on_200_vectors(rng):
    pairs, _ = training_set(rng, per_label=10, spread=1.0)
    model = train_centroids(pairs)
    agreement = 0
    for _ in range(200):
        f = random_features(rng)
        if classify(f, model)[0] == brute_force_label(model, f):
            agreement += 1
    assert agreement == 200


def test_training_set_self_classification(rng):
    # clusters separated by >= 4x their standard deviation classify themselves
    pairs, _ = training_set(rng, per_label=20, spread=0.5)
    model = train_centroids(pairs)
    for label, feats in pairs:
        assert classify(feats, model)[0] == label


def test_model_io_round_trip(tmp_path, rng):
    pairs, _ = training_set(rng, per_label=4, spread=0.4)
    model = train_centroids(pairs)
    path = tmp_path / "centroids.model"
    body_io.save_model(path, model)
    loaded = body_io.load_model(path)
    np.testing.assert_array_equal(loaded.centroids, model.centroids)
    np.testing.assert_array_equal(loaded.feature_mean, model.feature_mean)
    np.testing.assert_array_equal(loaded.feature_scale, model.feature_scale)
    for _ in range(20):
        f = random_features(rng)
        assert classify(f, loaded) == classify(f, model)


def test_trace_io_round_trip(tmp_path):
    from test_body_features import make_trace

    trace = make_trace(n=10)
    path = tmp_path / "trace.csv"
    body_io.write_trace(path, trace)
    loaded = body_io.read_trace(path)
    assert len(loaded) == len(trace)
    for a, b in zip(loaded, trace):
        assert a.timestamp_ms == b.timestamp_ms
        for joint in a.joints:
            assert a.joints[joint] == tuple(b.joints[joint])
