"""PCM WAV reading and writing: 16-bit signed little-endian, mono, 16 kHz."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

from .voice.dsp import AudioClip

REQUIRED_RATE = 16000


class WavFormatError(Exception):
    """File is not 16-bit mono PCM at 16 kHz."""


def read_wav(path: str | Path) -> AudioClip:
    try:
        with wave.open(str(path), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            if channels != 1:
                raise WavFormatError(f"{path}: expected mono, got {channels} channels")
            if width != 2:
                raise WavFormatError(f"{path}: expected 16-bit samples, got {8 * width}-bit")
            if rate != REQUIRED_RATE:
                raise WavFormatError(f"{path}: expected {REQUIRED_RATE} Hz, got {rate} Hz (resampling unsupported)")
            raw = wav.readframes(wav.getnframes())
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: not a readable WAV file ({exc})") from None
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if samples.size == 0:
        raise WavFormatError(f"{path}: contains no samples")
    return AudioClip(samples=samples, sample_rate_hz=rate)


def write_wav(path: str | Path, clip: AudioClip) -> None:
    scaled = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(clip.sample_rate_hz)
        wav.writeframes(scaled.tobytes())
