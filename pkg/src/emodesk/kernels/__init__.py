"""Numeric kernels with a compiled core and a pure-numpy fallback.

The Cython extension ``_accel`` is preferred when it built; otherwise the
numpy implementation in ``_ref`` is used.  Set ``EMODESK_PURE_PYTHON=1`` to
force the fallback (the parity tests and the benchmark do this).
"""

from __future__ import annotations

import os

from . import _ref

if os.environ.get("EMODESK_PURE_PYTHON"):
    nacf_matrix = _ref.nacf_matrix
    BACKEND = "python"
else:
    try:
        from . import _accel

        nacf_matrix = _accel.nacf_matrix
        BACKEND = "compiled"
    except ImportError:
        nacf_matrix = _ref.nacf_matrix
        BACKEND = "python"

__all__ = ["BACKEND", "nacf_matrix"]
