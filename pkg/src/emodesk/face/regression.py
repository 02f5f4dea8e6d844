"""Linear valence/arousal regression over 34 facial descriptors.

Slot convention (1-based): 1-28 per-frame expression descriptors, 29-31 head
pose yaw/pitch/roll, 32-34 windowed standard deviations of the pose angles.
Training is ridge regression with an unpenalized bias (fitted by mean
centering); prediction clamps to [-1, 1] and smooths across consecutive
frames with new-sample weight 0.3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..emotionml import AVPoint

N_FEATURES = 34
POSE_SLOTS = slice(28, 31)  # yaw, pitch, roll (0-based)
POSE_STD_SLOTS = slice(31, 34)
POSE_WINDOW = 30
SMOOTHING_ALPHA = 0.3

OUTPUT_NAMES = ("valence", "arousal")


class FaceModelError(Exception):
    pass


class WindowTooSmall(FaceModelError):
    """Pose variation needs at least 2 frames."""


class DimensionMismatch(FaceModelError):
    """Training matrices disagree in shape or feature count."""


class DegenerateSystem(FaceModelError):
    """Unregularized training on a rank-deficient feature matrix."""


class UntrainedModel(FaceModelError):
    """Prediction attempted without a model."""


@dataclass(frozen=True)
class FaceFeatureFrame:
    timestamp_ms: float
    features: np.ndarray

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        object.__setattr__(self, "features", features)
        if features.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got shape {features.shape}")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")


def pose_variation(window: "list[FaceFeatureFrame] | np.ndarray") -> np.ndarray:
    """Population standard deviation of yaw/pitch/roll over the window."""
    if len(window) and isinstance(window[0], FaceFeatureFrame):
        poses = np.vstack([f.features[POSE_SLOTS] for f in window])
    else:
        poses = np.asarray(window, dtype=np.float64)
        if poses.ndim != 2 or poses.shape[1] != 3:
            raise ValueError("expected an (n, 3) array of yaw/pitch/roll angles")
    if poses.shape[0] < 2:
        raise WindowTooSmall("pose variation needs at least 2 frames")
    # first-frame centering keeps constant windows at exactly zero
    return np.std(poses - poses[0], axis=0)


@dataclass(frozen=True)
class LinearAVModel:
    """Weights (34, 2) and biases (2,) for (valence, arousal)."""

    weights: np.ndarray
    bias: np.ndarray
    ridge_lambda: float = 1.0

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)
        if weights.shape != (N_FEATURES, len(OUTPUT_NAMES)) or bias.shape != (len(OUTPUT_NAMES),):
            raise ValueError("model must hold (34, 2) weights and (2,) biases")
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise ValueError("model coefficients must be finite")

    def raw_predict(self, features: np.ndarray) -> np.ndarray:
        """Clamped (valence, arousal) for one feature vector, no smoothing."""
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (N_FEATURES,):
            raise DimensionMismatch(f"expected {N_FEATURES} features, got {features.shape}")
        return np.clip(features @ self.weights + self.bias, -1.0, 1.0)


def train_model(X: np.ndarray, y: np.ndarray, ridge_lambda: float = 1.0) -> LinearAVModel:
    """Ridge solution of ||Xw - y||^2 + lambda ||w||^2 per output column."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != N_FEATURES:
        raise DimensionMismatch(f"X must be (n, {N_FEATURES}), got {X.shape}")
    if y.ndim != 2 or y.shape != (X.shape[0], len(OUTPUT_NAMES)):
        raise DimensionMismatch(f"y must be ({X.shape[0]}, {len(OUTPUT_NAMES)}), got {y.shape}")
    if ridge_lambda < 0:
        raise ValueError("ridge_lambda must be >= 0")

    x_mean = X.mean(axis=0)
    y_mean = y.mean(axis=0)
    Xc = X - x_mean
    yc = y - y_mean
    gram = Xc.T @ Xc
    if ridge_lambda == 0.0 and np.linalg.matrix_rank(gram) < N_FEATURES:
        raise DegenerateSystem("feature matrix is rank deficient and lambda is 0")
    weights = np.linalg.solve(gram + ridge_lambda * np.eye(N_FEATURES), Xc.T @ yc)
    bias = y_mean - x_mean @ weights
    return LinearAVModel(weights=weights, bias=bias, ridge_lambda=float(ridge_lambda))


def ridge_objective(model: LinearAVModel, X: np.ndarray, y: np.ndarray) -> float:
    residual = X @ model.weights + model.bias - y
    return float(np.sum(residual**2) + model.ridge_lambda * np.sum(model.weights**2))


class AVPredictor:
    """Per-stream smoothing state over a shared immutable model."""

    def __init__(self, model: LinearAVModel | None, alpha: float = SMOOTHING_ALPHA):
        if model is None:
            raise UntrainedModel("no regression model available")
        self.model = model
        self.alpha = alpha
        self._smoothed: np.ndarray | None = None

    def reset(self) -> None:
        self._smoothed = None

    def push(self, frame: FaceFeatureFrame) -> AVPoint:
        """Clamp the raw prediction, then blend with the previous output."""
        raw = self.model.raw_predict(frame.features)
        if self._smoothed is None:
            self._smoothed = raw
        else:
            self._smoothed = (1.0 - self.alpha) * self._smoothed + self.alpha * raw
        valence, arousal = self._smoothed
        return AVPoint(arousal=float(arousal), valence=float(valence))


class PoseTracker:
    """Rolling pose window that rewrites the three std slots of each frame."""

    def __init__(self, window: int = POSE_WINDOW):
        self.window = window
        self._poses: list[np.ndarray] = []

    def push(self, frame: FaceFeatureFrame) -> FaceFeatureFrame:
        self._poses.append(np.array(frame.features[POSE_SLOTS]))
        if len(self._poses) > self.window:
            self._poses.pop(0)
        if len(self._poses) < 2:
            return frame
        features = frame.features.copy()
        features[POSE_STD_SLOTS] = pose_variation(np.vstack(self._poses))
        return FaceFeatureFrame(timestamp_ms=frame.timestamp_ms, features=features)
