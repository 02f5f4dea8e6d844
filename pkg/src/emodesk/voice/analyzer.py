"""Utterance-level voice descriptors and prototype comparison.

An attempt is summarized into :class:`VoiceParams`, compared parameter by
parameter against a pre-recorded prototype, and scored with traffic lights:
green within 0.25 normalized distance, yellow within 0.5, red beyond.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..emotionml import AVPoint
from . import dsp

# fixed normalization scale per compared parameter
COMPARE_SCALES = {
    "mean_rms": 0.1,
    "f0_mean_hz": 100.0,
    "f0_std_hz": 50.0,
    "f0_onset_len_ms": 200.0,
    "voiced_ratio": 0.5,
}
COMPARED_PARAMS = tuple(COMPARE_SCALES)

GREEN_MAX = 0.25
YELLOW_MAX = 0.5


class VoiceAnalyzerError(Exception):
    pass


class EmptyLibrary(VoiceAnalyzerError):
    """No prototypes to compare against."""


class Light(str, Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


def light_for(distance: float) -> Light:
    if distance <= GREEN_MAX:
        return Light.GREEN
    if distance <= YELLOW_MAX:
        return Light.YELLOW
    return Light.RED


@dataclass(frozen=True)
class VoiceParams:
    """Per-utterance descriptors extracted from one clip."""

    mean_rms: float
    band_energies: tuple[float, ...]
    f0_mean_hz: float
    f0_std_hz: float
    f0_onset_len_ms: float
    voiced_ratio: float

    def compared(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in COMPARED_PARAMS}


@dataclass(frozen=True)
class TrafficFeedback:
    """Per-parameter and overall feedback for one attempt."""

    distances: dict[str, float]
    lights: dict[str, Light]
    overall_distance: float
    overall_light: Light


@dataclass(frozen=True)
class PrototypeEntry:
    """One reference utterance: its label, parameters and canonical point."""

    label: str
    params: VoiceParams
    canonical: AVPoint
    clip_path: str | None = None


def summarize(clip: dsp.AudioClip) -> VoiceParams:
    """Aggregate frame descriptors into utterance-level parameters."""
    frames = dsp.frame_signal(clip)
    rms = np.sqrt(np.mean(frames.raw * frames.raw, axis=1))
    bands = np.mean([dsp.band_energies(frame, frames.sample_rate_hz) for frame in frames.windowed], axis=0)
    contour = dsp.f0_contour(frames)
    voiced = contour > 0
    if voiced.any():
        f0_mean = float(np.mean(contour[voiced]))
        f0_std = float(np.std(contour[voiced]))
    else:
        f0_mean = 0.0
        f0_std = 0.0
    return VoiceParams(
        mean_rms=float(np.mean(rms)),
        band_energies=tuple(float(b) for b in bands),
        f0_mean_hz=f0_mean,
        f0_std_hz=f0_std,
        f0_onset_len_ms=float(dsp.f0_onset_length(contour, frames.hop_ms)),
        voiced_ratio=float(np.mean(voiced)),
    )


def parameter_distances(p: VoiceParams, ref: VoiceParams) -> dict[str, float]:
    a, b = p.compared(), ref.compared()
    return {name: abs(a[name] - b[name]) / COMPARE_SCALES[name] for name in COMPARED_PARAMS}


def compare_to_prototype(p: VoiceParams, ref: PrototypeEntry) -> TrafficFeedback:
    """Normalized per-parameter distances to a prototype, with lights."""
    distances = parameter_distances(p, ref.params)
    lights = {name: light_for(d) for name, d in distances.items()}
    overall = float(np.mean(list(distances.values())))
    return TrafficFeedback(
        distances=distances,
        lights=lights,
        overall_distance=overall,
        overall_light=light_for(overall),
    )


def estimate_emotion(p: VoiceParams, library: list[PrototypeEntry]) -> tuple[str, AVPoint, float]:
    """Nearest prototype by overall distance; ties go to the smallest label.

    The returned point is the winner's canonical point pulled toward neutral
    by min(D, 1): a perfect match lands exactly on the prototype.
    """
    if not library:
        raise EmptyLibrary("prototype library is empty")
    best: PrototypeEntry | None = None
    best_d = float("inf")
    for entry in sorted(library, key=lambda e: e.label):
        d = compare_to_prototype(p, entry).overall_distance
        if d < best_d:
            best, best_d = entry, d
    assert best is not None
    pull = 1.0 - min(best_d, 1.0)
    point = AVPoint(arousal=best.canonical.arousal * pull, valence=best.canonical.valence * pull)
    return best.label, point, best_d
