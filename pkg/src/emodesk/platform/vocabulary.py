"""The 20 platform emotions, their canonical arousal-valence points, and
quadrant arithmetic.

The canonical table ships as defaults and can be overridden from the
configuration file; every point sits strictly inside its quadrant (no zero
coordinates).  On axis points the quadrant rule counts 0 as positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..emotionml import AVPoint


class Quadrant(str, Enum):
    POS_VALENCE_HIGH_AROUSAL = "pos_valence_high_arousal"
    NEG_VALENCE_HIGH_AROUSAL = "neg_valence_high_arousal"
    NEG_VALENCE_LOW_AROUSAL = "neg_valence_low_arousal"
    POS_VALENCE_LOW_AROUSAL = "pos_valence_low_arousal"


def quadrant(p: AVPoint) -> Quadrant:
    """Sign-based quadrant; zero coordinates count as positive."""
    pos_v = p.valence >= 0
    pos_a = p.arousal >= 0
    if pos_v and pos_a:
        return Quadrant.POS_VALENCE_HIGH_AROUSAL
    if not pos_v and pos_a:
        return Quadrant.NEG_VALENCE_HIGH_AROUSAL
    if not pos_v and not pos_a:
        return Quadrant.NEG_VALENCE_LOW_AROUSAL
    return Quadrant.POS_VALENCE_LOW_AROUSAL


class UnknownEmotion(Exception):
    """Label is not one of the platform's 20 emotions."""


# (valence, arousal) defaults; overridable via configuration
_DEFAULT_POINTS: dict[str, tuple[float, float]] = {
    "happy": (0.6, 0.5),
    "sad": (-0.6, -0.5),
    "afraid": (-0.7, 0.6),
    "angry": (-0.6, 0.7),
    "disgusted": (-0.7, 0.3),
    "surprised": (0.2, 0.8),
    "excited": (0.7, 0.8),
    "interested": (0.5, 0.4),
    "bored": (-0.3, -0.6),
    "worried": (-0.5, 0.4),
    "disappointed": (-0.5, -0.3),
    "frustrated": (-0.6, 0.5),
    "hurt": (-0.7, -0.2),
    "kind": (0.6, 0.1),
    "jealous": (-0.5, 0.5),
    "unfriendly": (-0.4, 0.2),
    "joking": (0.5, 0.6),
    "sneaky": (-0.2, 0.3),
    "ashamed": (-0.6, -0.4),
    "proud": (0.5, 0.3),
}

EMOTION_LABELS = tuple(_DEFAULT_POINTS)


@dataclass(frozen=True)
class EmotionVocabulary:
    points: dict[str, AVPoint] = field(
        default_factory=lambda: {
            label: AVPoint(arousal=a, valence=v) for label, (v, a) in _DEFAULT_POINTS.items()
        }
    )

    def __post_init__(self) -> None:
        if set(self.points) != set(EMOTION_LABELS):
            raise ValueError(f"vocabulary must hold exactly the {len(EMOTION_LABELS)} platform emotions")
        for label, point in self.points.items():
            if point.arousal == 0.0 or point.valence == 0.0:
                raise ValueError(f"{label}: canonical point must sit strictly inside a quadrant")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.points)

    def __contains__(self, label: str) -> bool:
        return label in self.points

    def canonical_point(self, label: str) -> AVPoint:
        try:
            return self.points[label]
        except KeyError:
            raise UnknownEmotion(f"{label!r} is not a platform emotion") from None

    def canonical_quadrant(self, label: str) -> Quadrant:
        return quadrant(self.canonical_point(label))

    def with_overrides(self, overrides: dict[str, tuple[float, float]]) -> "EmotionVocabulary":
        """New vocabulary with some (valence, arousal) pairs replaced."""
        points = dict(self.points)
        for label, (v, a) in overrides.items():
            points[label] = AVPoint(arousal=a, valence=v)
        return EmotionVocabulary(points=points)


DEFAULT_VOCABULARY = EmotionVocabulary()
