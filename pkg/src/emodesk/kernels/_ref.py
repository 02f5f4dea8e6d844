"""Pure-numpy fallback for the pitch-search kernel.

Computes, for every analysis frame, the normalized autocorrelation

    r(tau) = sum_t x[t] x[t+tau] / sqrt(sum_{t < W-tau} x[t]^2 * sum_{t >= tau} x[t]^2)

over the lag range [min_lag, max_lag].  This is the hot inner loop of the
voice analyzer; the compiled twin in ``_accel.pyx`` runs the same arithmetic
in C loops.
"""

from __future__ import annotations

import numpy as np


def nacf_matrix(frames: np.ndarray, min_lag: int, max_lag: int) -> np.ndarray:
    """Normalized autocorrelation, shape (n_frames, max_lag - min_lag + 1)."""
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise ValueError("frames must be a 2-D array")
    n, width = frames.shape
    if not 1 <= min_lag <= max_lag < width:
        raise ValueError(f"lag range [{min_lag}, {max_lag}] invalid for frame width {width}")

    sq = frames * frames
    # prefix[:, k] = sum of squares of the first k samples
    prefix = np.zeros((n, width + 1))
    np.cumsum(sq, axis=1, out=prefix[:, 1:])
    total = prefix[:, width]

    out = np.empty((n, max_lag - min_lag + 1))
    for lag in range(min_lag, max_lag + 1):
        overlap = width - lag
        num = np.einsum("ij,ij->i", frames[:, :overlap], frames[:, lag:])
        head = prefix[:, overlap]
        tail = total - prefix[:, lag]
        denom = np.sqrt(head * tail)
        col = out[:, lag - min_lag]
        np.divide(num, denom, out=col, where=denom > 0.0)
        col[denom <= 0.0] = 0.0
    return out
