# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-numpy pitch-search kernel in ``_ref``."""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def nacf_matrix(object frames_obj, int min_lag, int max_lag):
    """Normalized autocorrelation, shape (n_frames, max_lag - min_lag + 1)."""
    frames_arr = np.ascontiguousarray(frames_obj, dtype=np.float64)
    if frames_arr.ndim != 2:
        raise ValueError("frames must be a 2-D array")
    cdef Py_ssize_t n = frames_arr.shape[0]
    cdef Py_ssize_t width = frames_arr.shape[1]
    if not 1 <= min_lag <= max_lag < width:
        raise ValueError(f"lag range [{min_lag}, {max_lag}] invalid for frame width {width}")

    cdef cnp.ndarray[cnp.float64_t, ndim=2] frames = frames_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, max_lag - min_lag + 1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] prefix = np.empty(width + 1)

    cdef Py_ssize_t i, t, lag, overlap
    cdef double num, head, tail, denom, x

    for i in range(n):
        prefix[0] = 0.0
        for t in range(width):
            x = frames[i, t]
            prefix[t + 1] = prefix[t] + x * x
        for lag in range(min_lag, max_lag + 1):
            overlap = width - lag
            num = 0.0
            for t in range(overlap):
                num += frames[i, t] * frames[i, t + lag]
            head = prefix[overlap]
            tail = prefix[width] - prefix[lag]
            denom = sqrt(head * tail)
            if denom > 0.0:
                out[i, lag - min_lag] = num / denom
            else:
                out[i, lag - min_lag] = 0.0
    return out
