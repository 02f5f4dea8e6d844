"""EmotionML subset codec used as the message-bus payload format.

The dialect emitted and accepted here:

    <emotionml dimension-set="arousal-valence">
      <emotion expressed-through="voice" confidence="0.9">
        <dimension name="arousal" value="0.75"/>
        <dimension name="valence" value="0.25"/>
        <category name="happy"/>
        <info timestamp-ms="1200"/>
      </emotion>
    </emotionml>

``expressed-through`` is ``face``, ``voice`` or ``gesture``; an emotion
element without the attribute is a fused (platform-level) result.  Dimension
values live on the wire in [0, 1]; the signed [-1, 1] plane used internally
is reached through :func:`to_internal` / :func:`from_internal`.

Unknown elements and attributes are ignored so richer EmotionML documents
still parse.  Parsing failures always raise one of :class:`MalformedDocument`,
:class:`MissingDimension` or :class:`ValueOutOfRange`.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.etree import ElementTree as etree

MODALITIES = ("face", "voice", "body", "fused")

# body is transported as "gesture", matching the analyser naming on the wire
_MODALITY_TO_WIRE = {"face": "face", "voice": "voice", "body": "gesture"}
_WIRE_TO_MODALITY = {v: k for k, v in _MODALITY_TO_WIRE.items()}

DIMENSION_SET = "arousal-valence"


class EmotionMLError(Exception):
    """Base class for codec errors."""


class MalformedDocument(EmotionMLError):
    """Input is not a well-formed document of the expected shape."""


class MissingDimension(EmotionMLError):
    """An emotion element lacks the arousal or valence dimension."""


class ValueOutOfRange(EmotionMLError):
    """A dimension or confidence value is not a decimal in [0, 1]."""


class InvalidAnnotation(EmotionMLError):
    """An annotation handed to the serializer violates its invariants."""


@dataclass(frozen=True)
class AVPoint:
    """A point in the signed arousal-valence plane, both axes in [-1, 1]."""

    arousal: float
    valence: float

    def __post_init__(self) -> None:
        for name in ("arousal", "valence"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or v != v or not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a finite value in [-1, 1], got {v!r}")


@dataclass(frozen=True)
class EmotionAnnotation:
    """One ``<emotion>`` element: a single recognition result on the bus."""

    modality: str
    arousal: float
    valence: float
    category: str | None = None
    confidence: float | None = None
    timestamp_ms: int = 0

    @property
    def dimensions(self) -> dict[str, float]:
        return {"arousal": self.arousal, "valence": self.valence}

    def validate(self) -> None:
        if self.modality not in MODALITIES:
            raise InvalidAnnotation(f"unknown modality {self.modality!r}")
        for name, v in (("arousal", self.arousal), ("valence", self.valence)):
            if not isinstance(v, (int, float)) or v != v or not 0.0 <= v <= 1.0:
                raise InvalidAnnotation(f"{name} must be in [0, 1], got {v!r}")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise InvalidAnnotation(f"confidence must be in [0, 1], got {self.confidence!r}")
        if not isinstance(self.timestamp_ms, int) or self.timestamp_ms < 0:
            raise InvalidAnnotation(f"timestamp_ms must be a non-negative int, got {self.timestamp_ms!r}")


def _localname(tag: object) -> str:
    # tolerate namespaced documents: {uri}emotion -> emotion
    if not isinstance(tag, str):
        return ""
    return tag.rsplit("}", 1)[-1]


def _parse_unit_value(raw: str, what: str) -> float:
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ValueOutOfRange(f"{what} value {raw!r} is not a decimal") from None
    if v != v or not 0.0 <= v <= 1.0:
        raise ValueOutOfRange(f"{what} value {raw!r} outside [0, 1]")
    return v


def parse_emotionml(text: str | bytes) -> list[EmotionAnnotation]:
    """Parse an EmotionML document into annotations, document order preserved."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not UTF-8: {exc}") from None
    try:
        root = etree.fromstring(text)
    except etree.ParseError as exc:
        raise MalformedDocument(str(exc)) from None
    if _localname(root.tag) != "emotionml":
        raise MalformedDocument(f"root element is {root.tag!r}, expected emotionml")

    annotations = []
    for emotion in root:
        if _localname(emotion.tag) != "emotion":
            continue
        annotations.append(_parse_emotion(emotion))
    if not annotations:
        raise MalformedDocument("document contains no emotion elements")
    return annotations


def _parse_emotion(emotion: etree.Element) -> EmotionAnnotation:
    wire_modality = emotion.get("expressed-through")
    if wire_modality is None:
        modality = "fused"
    elif wire_modality in _WIRE_TO_MODALITY:
        modality = _WIRE_TO_MODALITY[wire_modality]
    else:
        raise MalformedDocument(f"unknown expressed-through {wire_modality!r}")

    confidence = None
    if emotion.get("confidence") is not None:
        confidence = _parse_unit_value(emotion.get("confidence"), "confidence")

    dims: dict[str, float] = {}
    category = None
    timestamp_ms = 0
    for child in emotion:
        tag = _localname(child.tag)
        if tag == "dimension":
            name = child.get("name")
            if name in ("arousal", "valence"):
                dims[name] = _parse_unit_value(child.get("value"), name)
        elif tag == "category":
            category = child.get("name")
        elif tag == "info":
            raw = child.get("timestamp-ms")
            if raw is not None:
                try:
                    timestamp_ms = int(raw)
                except ValueError:
                    raise MalformedDocument(f"timestamp-ms {raw!r} is not an integer") from None
                if timestamp_ms < 0:
                    raise MalformedDocument(f"timestamp-ms {raw!r} is negative")
    for name in ("arousal", "valence"):
        if name not in dims:
            raise MissingDimension(f"emotion element lacks the {name} dimension")

    return EmotionAnnotation(
        modality=modality,
        arousal=dims["arousal"],
        valence=dims["valence"],
        category=category,
        confidence=confidence,
        timestamp_ms=timestamp_ms,
    )


def serialize_emotionml(annotations: list[EmotionAnnotation]) -> str:
    """Render annotations as an EmotionML document that parses back exactly."""
    if not annotations:
        raise InvalidAnnotation("annotation list is empty")
    root = etree.Element("emotionml", {"dimension-set": DIMENSION_SET})
    for a in annotations:
        a.validate()
        attrs = {}
        if a.modality != "fused":
            attrs["expressed-through"] = _MODALITY_TO_WIRE[a.modality]
        if a.confidence is not None:
            attrs["confidence"] = repr(float(a.confidence))
        emotion = etree.SubElement(root, "emotion", attrs)
        for name in ("arousal", "valence"):
            etree.SubElement(emotion, "dimension", {"name": name, "value": repr(float(a.dimensions[name]))})
        if a.category is not None:
            etree.SubElement(emotion, "category", {"name": a.category})
        etree.SubElement(emotion, "info", {"timestamp-ms": str(a.timestamp_ms)})
    return etree.tostring(root, encoding="unicode")


def to_internal(a: EmotionAnnotation) -> AVPoint:
    """Map wire-scale [0, 1] dimension values onto the signed plane."""
    return AVPoint(arousal=2.0 * a.arousal - 1.0, valence=2.0 * a.valence - 1.0)


def from_internal(
    p: AVPoint,
    modality: str,
    category: str | None = None,
    confidence: float | None = None,
    timestamp_ms: int = 0,
) -> EmotionAnnotation:
    """Build a wire annotation from an internal arousal-valence point."""
    a = EmotionAnnotation(
        modality=modality,
        arousal=(p.arousal + 1.0) / 2.0,
        valence=(p.valence + 1.0) / 2.0,
        category=category,
        confidence=confidence,
        timestamp_ms=timestamp_ms,
    )
    a.validate()
    return a
