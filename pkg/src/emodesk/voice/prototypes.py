"""Prototype library on disk: one directory per emotion.

    <root>/happy/reference.wav
    <root>/happy/params        <- key:value sidecar with the VoiceParams

The sidecar keys are the VoiceParams fields; ``band_energies`` is a comma
list of 8 values.  Canonical arousal-valence points come from the platform
vocabulary, keyed by the directory name.
"""

from __future__ import annotations

from pathlib import Path

from ..platform.vocabulary import EmotionVocabulary
from .analyzer import PrototypeEntry, VoiceParams, summarize

PARAMS_FILENAME = "params"
REFERENCE_FILENAME = "reference.wav"


class PrototypeLibraryError(Exception):
    pass


def params_to_text(params: VoiceParams) -> str:
    lines = [
        f"mean_rms:{params.mean_rms!r}",
        "band_energies:" + ",".join(repr(b) for b in params.band_energies),
        f"f0_mean_hz:{params.f0_mean_hz!r}",
        f"f0_std_hz:{params.f0_std_hz!r}",
        f"f0_onset_len_ms:{params.f0_onset_len_ms!r}",
        f"voiced_ratio:{params.voiced_ratio!r}",
    ]
    return "\n".join(lines) + "\n"


def params_from_text(text: str, source: str = "<params>") -> VoiceParams:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise PrototypeLibraryError(f"{source}:{lineno}: expected key:value, got {line!r}")
        values[key.strip()] = value.strip()
    try:
        return VoiceParams(
            mean_rms=float(values["mean_rms"]),
            band_energies=tuple(float(v) for v in values["band_energies"].split(",")),
            f0_mean_hz=float(values["f0_mean_hz"]),
            f0_std_hz=float(values["f0_std_hz"]),
            f0_onset_len_ms=float(values["f0_onset_len_ms"]),
            voiced_ratio=float(values["voiced_ratio"]),
        )
    except (KeyError, ValueError) as exc:
        raise PrototypeLibraryError(f"{source}: bad or missing field ({exc})") from None


def save_entry(root: str | Path, label: str, params: VoiceParams) -> Path:
    directory = Path(root) / label
    directory.mkdir(parents=True, exist_ok=True)
    sidecar = directory / PARAMS_FILENAME
    sidecar.write_text(params_to_text(params), encoding="utf-8")
    return sidecar


def load_library(root: str | Path, vocabulary: EmotionVocabulary) -> list[PrototypeEntry]:
    """Scan the library root; labels must be vocabulary emotions."""
    root = Path(root)
    if not root.is_dir():
        raise PrototypeLibraryError(f"prototype root {root} is not a directory")
    entries = []
    for directory in sorted(p for p in root.iterdir() if p.is_dir()):
        label = directory.name
        canonical = vocabulary.canonical_point(label)
        sidecar = directory / PARAMS_FILENAME
        reference = directory / REFERENCE_FILENAME
        if not sidecar.is_file():
            raise PrototypeLibraryError(f"{directory}: missing {PARAMS_FILENAME} sidecar")
        params = params_from_text(sidecar.read_text(encoding="utf-8"), source=str(sidecar))
        entries.append(
            PrototypeEntry(
                label=label,
                params=params,
                canonical=canonical,
                clip_path=str(reference) if reference.is_file() else None,
            )
        )
    if not entries:
        raise PrototypeLibraryError(f"no prototype directories under {root}")
    return entries


def build_library(root: str | Path, clips: dict[str, "object"], vocabulary: EmotionVocabulary) -> list[PrototypeEntry]:
    """Analyze reference clips and write a library; used to seed fixtures."""
    from .. import wavio

    root = Path(root)
    for label, clip in clips.items():
        vocabulary.canonical_point(label)
        directory = root / label
        directory.mkdir(parents=True, exist_ok=True)
        wavio.write_wav(directory / REFERENCE_FILENAME, clip)
        analyzed = wavio.read_wav(directory / REFERENCE_FILENAME)
        save_entry(root, label, summarize(analyzed))
    return load_library(root, vocabulary)
