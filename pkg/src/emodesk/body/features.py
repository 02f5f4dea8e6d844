"""Expressive full-body features from skeleton traces.

Coordinate convention: meters, y up, shoulder axis pointing left to right;
"forward" is cross(shoulder_axis, up).  Velocities, accelerations and jerk
come from plain central differences on the (possibly non-uniform)
timestamps, with one-sided differences at the trace ends.

Each formula below is the module's canonical definition of its feature:

* kinetic energies: mean of 0.5 |v|^2 over the listed joints, unit masses
* symmetry: 1 - mean(|l_hand - mirror(r_hand)|) / shoulder_width, where the
  mirror plane is the sagittal plane through the torso
* lean_angle: signed angle of the torso->neck vector against vertical in the
  sagittal plane, forward positive
* directness: straight-line displacement over path length of the dominant
  (longer-path) hand; 1 when the path is under 1 mm
* impulsivity: max |a| over mean |a| across all joints; 1 for zero motion
* fluidity: 1 / (1 + J) with J = mean|jerk| * mean_dt^2 / (mean_speed + eps)
* openness: mean hand-to-torso span over shoulder width, divided by 3 and
  clamped to [0, 1]
* sway: largest one-sided spectral amplitude of horizontal torso displacement
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

JOINTS = (
    "head",
    "neck",
    "l_shoulder",
    "r_shoulder",
    "l_elbow",
    "r_elbow",
    "l_hand",
    "r_hand",
    "torso",
    "l_hip",
    "r_hip",
)
_JOINT_INDEX = {name: i for i, name in enumerate(JOINTS)}
_HANDS = (_JOINT_INDEX["l_hand"], _JOINT_INDEX["r_hand"])
_HEAD = (_JOINT_INDEX["head"],)
_UPPER = tuple(_JOINT_INDEX[j] for j in JOINTS if j not in ("l_hip", "r_hip"))

UP = np.array([0.0, 1.0, 0.0])

MIN_FRAMES = 3
MIN_SPAN_MS = 200.0

ENERGY_THRESHOLD = 0.01
MIN_GESTURE_MS = 300.0
GESTURE_PAD_MS = 100.0


class BodyFeatureError(Exception):
    pass


class TooFewFrames(BodyFeatureError):
    """Trace has fewer than 3 frames or spans under 200 ms."""


class NonMonotoneTimestamps(BodyFeatureError):
    """Timestamps must strictly increase along a trace."""


@dataclass(frozen=True)
class SkeletonFrame:
    timestamp_ms: float
    joints: dict[str, tuple[float, float, float]]

    def __post_init__(self) -> None:
        missing = [j for j in JOINTS if j not in self.joints]
        if missing:
            raise ValueError(f"frame at {self.timestamp_ms} ms lacks joints: {missing}")
        for name, pos in self.joints.items():
            if len(pos) != 3 or not all(np.isfinite(pos)):
                raise ValueError(f"joint {name}: position must be 3 finite coordinates")


@dataclass(frozen=True)
class BodyFeatures:
    ke_hands: float
    ke_head: float
    ke_upper: float
    symmetry: float
    lean_angle: float
    directness: float
    impulsivity: float
    fluidity: float
    openness: float
    sway: float

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.float64)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "BodyFeatures":
        names = [f.name for f in fields(cls)]
        if len(vector) != len(names):
            raise ValueError(f"expected {len(names)} values, got {len(vector)}")
        return cls(**{name: float(v) for name, v in zip(names, vector)})


FEATURE_NAMES = tuple(f.name for f in fields(BodyFeatures))


def trace_arrays(trace: list[SkeletonFrame]) -> tuple[np.ndarray, np.ndarray]:
    """Timestamps (seconds) and positions (frames, joints, 3) as arrays."""
    t = np.array([f.timestamp_ms for f in trace], dtype=np.float64)
    if np.any(np.diff(t) <= 0):
        raise NonMonotoneTimestamps("timestamps must strictly increase")
    p = np.array([[f.joints[j] for j in JOINTS] for f in trace], dtype=np.float64)
    return t / 1000.0, p


def _central_diff(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Central differences on the interior, one-sided at the ends.

    Unlike the weighted non-uniform-grid stencil, the plain difference
    quotient is exactly zero for constant signals.
    """
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (t[2:] - t[:-2])[:, None, None]
    out[0] = (y[1] - y[0]) / (t[1] - t[0])
    out[-1] = (y[-1] - y[-2]) / (t[-1] - t[-2])
    return out


def _kinetic_energy(speeds: np.ndarray, joint_idx: tuple[int, ...]) -> float:
    return float(np.mean(0.5 * speeds[:, joint_idx] ** 2))


def extract_features(trace: list[SkeletonFrame]) -> BodyFeatures:
    if len(trace) < MIN_FRAMES:
        raise TooFewFrames(f"need at least {MIN_FRAMES} frames, got {len(trace)}")
    if trace[-1].timestamp_ms - trace[0].timestamp_ms < MIN_SPAN_MS:
        raise TooFewFrames(f"trace must span at least {MIN_SPAN_MS} ms")
    t, p = trace_arrays(trace)

    v = _central_diff(p, t)
    a = _central_diff(v, t)
    jerk = _central_diff(a, t)
    speeds = np.linalg.norm(v, axis=2)
    accel = np.linalg.norm(a, axis=2)
    jerk_mag = np.linalg.norm(jerk, axis=2)

    torso = p[:, _JOINT_INDEX["torso"]]
    neck = p[:, _JOINT_INDEX["neck"]]
    l_sh = p[:, _JOINT_INDEX["l_shoulder"]]
    r_sh = p[:, _JOINT_INDEX["r_shoulder"]]
    l_hand = p[:, _JOINT_INDEX["l_hand"]]
    r_hand = p[:, _JOINT_INDEX["r_hand"]]

    shoulder_vec = r_sh - l_sh
    width = np.linalg.norm(shoulder_vec, axis=1)
    valid = width > 1e-6
    axis = np.zeros_like(shoulder_vec)
    axis[valid] = shoulder_vec[valid] / width[valid, None]

    # mirror the right hand about the sagittal plane through the torso
    offset = r_hand - torso
    mirrored = r_hand - 2.0 * np.sum(offset * axis, axis=1)[:, None] * axis
    if valid.any():
        mismatch = np.linalg.norm(l_hand - mirrored, axis=1)[valid] / width[valid]
        symmetry = float(np.clip(1.0 - np.mean(mismatch), 0.0, 1.0))
    else:
        symmetry = 1.0

    forward = np.cross(axis, np.broadcast_to(UP, axis.shape))
    fnorm = np.linalg.norm(forward, axis=1)
    fvalid = fnorm > 1e-6
    spine = neck - torso
    lean_samples = []
    for i in range(len(trace)):
        if not fvalid[i] or np.linalg.norm(spine[i]) < 1e-9:
            continue
        f_hat = forward[i] / fnorm[i]
        lean_samples.append(np.arctan2(spine[i] @ f_hat, spine[i] @ UP))
    lean_angle = float(np.mean(lean_samples)) if lean_samples else 0.0

    path_l = float(np.sum(np.linalg.norm(np.diff(l_hand, axis=0), axis=1)))
    path_r = float(np.sum(np.linalg.norm(np.diff(r_hand, axis=0), axis=1)))
    dominant = l_hand if path_l >= path_r else r_hand
    path = max(path_l, path_r)
    if path < 1e-3:
        directness = 1.0
    else:
        displacement = float(np.linalg.norm(dominant[-1] - dominant[0]))
        directness = float(np.clip(displacement / path, 1e-9, 1.0))

    mean_accel = float(np.mean(accel))
    impulsivity = 1.0 if mean_accel < 1e-12 else max(float(np.max(accel)) / mean_accel, 1.0)

    mean_speed = float(np.mean(speeds))
    mean_dt = float(np.mean(np.diff(t)))
    norm_jerk = float(np.mean(jerk_mag)) * mean_dt**2 / (mean_speed + 1e-9)
    fluidity = 1.0 / (1.0 + norm_jerk)

    span = 0.5 * (np.linalg.norm(l_hand - torso, axis=1) + np.linalg.norm(r_hand - torso, axis=1))
    if valid.any():
        openness = float(np.clip(np.mean(span[valid] / width[valid]) / 3.0, 0.0, 1.0))
    else:
        openness = 0.0

    horizontal = torso[:, [0, 2]] - np.mean(torso[:, [0, 2]], axis=0)
    spectrum = np.abs(np.fft.rfft(horizontal, axis=0)) * (2.0 / len(trace))
    sway = float(np.max(spectrum[1:])) if spectrum.shape[0] > 1 else 0.0

    return BodyFeatures(
        ke_hands=_kinetic_energy(speeds, _HANDS),
        ke_head=_kinetic_energy(speeds, _HEAD),
        ke_upper=_kinetic_energy(speeds, _UPPER),
        symmetry=symmetry,
        lean_angle=lean_angle,
        directness=directness,
        impulsivity=impulsivity,
        fluidity=fluidity,
        openness=openness,
        sway=sway,
    )


def segment_gestures(
    trace: list[SkeletonFrame],
    threshold: float = ENERGY_THRESHOLD,
    min_ms: float = MIN_GESTURE_MS,
    pad_ms: float = GESTURE_PAD_MS,
) -> list[tuple[float, float]]:
    """Maximal runs of total-body kinetic energy above ``threshold``.

    Runs shorter than ``min_ms`` are dropped; survivors are padded by
    ``pad_ms`` per side, clamped to the trace, and merged when they touch.
    """
    if len(trace) < MIN_FRAMES:
        return []
    t, p = trace_arrays(trace)
    v = _central_diff(p, t)
    energy = 0.5 * np.sum(np.linalg.norm(v, axis=2) ** 2, axis=1)
    active = energy > threshold

    t_ms = t * 1000.0
    segments: list[tuple[float, float]] = []
    start: int | None = None
    for i, flag in enumerate(np.append(active, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            begin, end = t_ms[start], t_ms[i - 1]
            if end - begin >= min_ms:
                segments.append(
                    (max(begin - pad_ms, t_ms[0]), min(end + pad_ms, t_ms[-1]))
                )
            start = None

    merged: list[tuple[float, float]] = []
    for begin, end in segments:
        if merged and begin <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((begin, end))
    return merged
