"""Backend selection for the hot reduction kernels.

The compiled Cython extension is preferred; the numpy implementation is the
fallback. ``ISACRELAY_BACKEND=numpy`` forces the fallback (useful for
benchmarks and debugging).
"""

import os

_forced = os.environ.get("ISACRELAY_BACKEND", "").lower()

if _forced == "numpy":
    from ._mi_numpy import cond_mi_bits, entropy_bits

    BACKEND = "numpy"
else:
    try:
        from ._fastmi import cond_mi_bits, entropy_bits

        BACKEND = "cython"
    except ImportError:
        from ._mi_numpy import cond_mi_bits, entropy_bits

        BACKEND = "numpy"

__all__ = ["entropy_bits", "cond_mi_bits", "BACKEND"]
