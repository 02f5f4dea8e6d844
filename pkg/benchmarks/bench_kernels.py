#!/usr/bin/env python3
"""Compare the compiled and pure-numpy pitch-search kernels.

    python3 benchmarks/bench_kernels.py [--seconds-of-audio 30]

Times nacf_matrix over framed audio at the voice analyzer's production
geometry (16 kHz, 25 ms frames, 10 ms hop, lags for 50-600 Hz) and reports
per-backend throughput plus the numeric gap between the two results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from emodesk.kernels import _ref

try:
    from emodesk.kernels import _accel
except ImportError:
    _accel = None


def make_frames(seconds: float, sr: int = 16000, frame: int = 400, hop: int = 160) -> np.ndarray:
    rng = np.random.default_rng(7)
    t = np.arange(int(seconds * sr)) / sr
    voice_like = 0.4 * np.sin(2 * np.pi * 180 * t) + 0.2 * np.sin(2 * np.pi * 360 * t)
    voice_like += 0.05 * rng.normal(size=t.size)
    starts = np.arange(0, t.size - frame, hop)
    return np.stack([voice_like[s : s + frame] for s in starts])


def bench(fn, frames: np.ndarray, min_lag: int, max_lag: int, repeats: int = 3) -> tuple[float, np.ndarray]:
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(frames, min_lag, max_lag)
        best = min(best, time.perf_counter() - start)
    return best, out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seconds-of-audio", type=float, default=30.0)
    args = parser.parse_args()

    frames = make_frames(args.seconds_of_audio)
    min_lag, max_lag = 27, 320
    print(f"{frames.shape[0]} frames x {frames.shape[1]} samples, lags {min_lag}..{max_lag}")

    t_ref, out_ref = bench(_ref.nacf_matrix, frames, min_lag, max_lag)
    audio_s = args.seconds_of_audio
    print(f"python  backend: {t_ref * 1e3:8.1f} ms  ({audio_s / t_ref:7.1f}x realtime)")

    if _accel is None:
        print("compiled backend: not built (pip install -e . rebuilds it)")
        return 0

    t_acc, out_acc = bench(_accel.nacf_matrix, frames, min_lag, max_lag)
    print(f"compiled backend: {t_acc * 1e3:8.1f} ms  ({audio_s / t_acc:7.1f}x realtime)")
    print(f"speedup: {t_ref / t_acc:.2f}x, max |delta|: {np.max(np.abs(out_ref - out_acc)):.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
