"""Prosodic and energy descriptors for recorded speech.

Framing is 25 ms / 10 ms hop with a Hann window.  RMS energy is computed on
the raw (pre-window) samples, spectral band energies on the windowed ones,
and the F0 contour by a normalized-autocorrelation peak search on the raw
samples (windowing would taper the correlation at large lags).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kernels import nacf_matrix

FRAME_MS = 25.0
HOP_MS = 10.0
BAND_EDGES_HZ = (20.0, 50.0, 125.0, 315.0, 800.0, 1600.0, 3200.0, 5000.0, 8000.0)
N_BANDS = len(BAND_EDGES_HZ) - 1
F0_MIN_HZ = 50.0
F0_MAX_HZ = 600.0
VOICING_PEAK_MIN = 0.45
VOICING_RMS_MIN = 0.01
# a subharmonic peak at lag/d this close to the maximum wins: true period
_OCTAVE_RATIO = 0.90


class VoiceDspError(Exception):
    pass


class TooShort(VoiceDspError):
    """Clip shorter than one analysis frame."""


class RateTooLow(VoiceDspError):
    """Sample rate below the 16 kHz the band layout requires."""


@dataclass(frozen=True)
class AudioClip:
    """Normalized mono samples in [-1, 1] at a fixed rate."""

    samples: np.ndarray
    sample_rate_hz: int = 16000

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_ms(self) -> float:
        return 1000.0 * self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class FrameSet:
    """Framed view of a clip: raw rows for energy, windowed rows for spectra."""

    raw: np.ndarray
    windowed: np.ndarray
    sample_rate_hz: int
    hop_samples: int

    @property
    def count(self) -> int:
        return self.raw.shape[0]

    @property
    def hop_ms(self) -> float:
        return 1000.0 * self.hop_samples / self.sample_rate_hz


def frame_signal(clip: AudioClip, frame_ms: float = FRAME_MS, hop_ms: float = HOP_MS) -> FrameSet:
    """Slice a clip into Hann-windowed frames; count = 1 + floor((N - frame) / hop)."""
    sr = clip.sample_rate_hz
    frame_len = int(round(frame_ms * sr / 1000.0))
    hop = int(round(hop_ms * sr / 1000.0))
    if frame_len < 2 or hop < 1:
        raise ValueError("frame and hop must span at least 2 and 1 samples")
    n = clip.samples.size
    if n < frame_len:
        raise TooShort(f"clip of {n} samples is shorter than one {frame_len}-sample frame")
    count = 1 + (n - frame_len) // hop
    idx = hop * np.arange(count)[:, None] + np.arange(frame_len)[None, :]
    raw = clip.samples[idx]
    window = np.hanning(frame_len)
    return FrameSet(raw=raw, windowed=raw * window, sample_rate_hz=sr, hop_samples=hop)


def rms_energy(frame: np.ndarray) -> float:
    """Root-mean-square of the pre-window samples of one frame."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise ValueError("frame is empty")
    return float(np.sqrt(np.mean(frame * frame)))


def band_edges_to_bins(n_fft: int, sample_rate_hz: int) -> np.ndarray:
    """Band index per rFFT bin; -1 marks bins outside [20 Hz, 8 kHz]."""
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate_hz)
    bands = np.full(freqs.size, -1, dtype=np.intp)
    for b in range(N_BANDS):
        lo, hi = BAND_EDGES_HZ[b], BAND_EDGES_HZ[b + 1]
        if b == N_BANDS - 1:
            mask = (freqs >= lo) & (freqs <= hi)
        else:
            mask = (freqs >= lo) & (freqs < hi)
        bands[mask] = b
    return bands


def band_energies(frame: np.ndarray, sample_rate_hz: int) -> np.ndarray:
    """Magnitude-squared spectrum summed over the 8 log-spaced bands."""
    if sample_rate_hz < 16000:
        raise RateTooLow(f"band layout needs >= 16 kHz, got {sample_rate_hz}")
    frame = np.asarray(frame, dtype=np.float64)
    spectrum = np.abs(np.fft.rfft(frame)) ** 2
    bands = band_edges_to_bins(frame.size, sample_rate_hz)
    out = np.zeros(N_BANDS)
    valid = bands >= 0
    np.add.at(out, bands[valid], spectrum[valid])
    return out


def _parabolic_lag(col: np.ndarray, i: int) -> float:
    """Refine an interior peak index by fitting a parabola through 3 points."""
    if i <= 0 or i >= col.size - 1:
        return float(i)
    denom = col[i - 1] - 2.0 * col[i] + col[i + 1]
    if denom == 0.0:
        return float(i)
    delta = 0.5 * (col[i - 1] - col[i + 1]) / denom
    return float(i) + float(np.clip(delta, -0.5, 0.5))


def _pick_lag(row: np.ndarray, min_lag: int) -> tuple[float, float]:
    """Best fractional lag and its peak value for one frame's nacf row.

    The true period is the smallest lag whose local maximum comes close to
    the global one; taking the global argmax alone lands on lag multiples
    (octave errors) for strongly periodic frames.
    """
    best = int(np.argmax(row))
    peak = float(row[best])
    if peak > 0.0:
        ge_left = np.empty(row.size, dtype=bool)
        ge_right = np.empty(row.size, dtype=bool)
        ge_left[0] = ge_right[-1] = True
        ge_left[1:] = row[1:] >= row[:-1]
        ge_right[:-1] = row[:-1] >= row[1:]
        candidates = (row >= _OCTAVE_RATIO * peak) & ge_left & ge_right
        best = int(np.argmax(candidates))
        peak = float(row[best])
    return _parabolic_lag(row, best) + min_lag, peak


def f0_contour(frames: FrameSet) -> np.ndarray:
    """Per-frame F0 in Hz; 0 marks unvoiced frames.

    A frame is voiced when its normalized-autocorrelation peak reaches 0.45
    and its raw RMS reaches 0.01; voiced values land in [50, 600] Hz.
    """
    sr = frames.sample_rate_hz
    width = frames.raw.shape[1]
    min_lag = math.ceil(sr / F0_MAX_HZ)
    max_lag = min(math.floor(sr / F0_MIN_HZ), width - 1)
    out = np.zeros(frames.count)
    if min_lag > max_lag or min_lag < 1:
        return out
    rms = np.sqrt(np.mean(frames.raw * frames.raw, axis=1))
    nacf = nacf_matrix(frames.raw, min_lag, max_lag)
    for i in range(frames.count):
        if rms[i] < VOICING_RMS_MIN:
            continue
        lag, peak = _pick_lag(nacf[i], min_lag)
        if peak < VOICING_PEAK_MIN:
            continue
        out[i] = float(np.clip(sr / lag, F0_MIN_HZ, F0_MAX_HZ))
    return out


def f0_onset_length(contour: np.ndarray, hop_ms: float = HOP_MS) -> float:
    """Duration in ms of the first maximal run of voiced frames; 0 if none."""
    contour = np.asarray(contour)
    run = 0
    for value in contour:
        if value > 0:
            run += 1
        elif run:
            break
    return run * hop_ms
