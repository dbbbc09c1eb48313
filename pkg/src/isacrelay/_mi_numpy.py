"""Pure-numpy reference implementations of the hot reduction kernels.

Used as the fallback backend when the compiled extension is unavailable;
also serves as the correctness oracle in the backend tests.
"""

import numpy as np


def entropy_bits(p):
    """-sum p log2 p over all cells, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.float64).ravel()
    nz = p > 0.0
    if not nz.any():
        return 0.0
    q = p[nz]
    return float(-(q * np.log2(q)).sum())


def cond_mi_bits(p):
    """I(A;B|C) in bits for a tensor of shape (|C|, |A|, |B|).

    Cells with zero mass contribute nothing; conditioning cells with zero
    total mass are skipped implicitly.
    """
    p = np.asarray(p, dtype=np.float64)
    pc = p.sum(axis=(1, 2))
    pac = p.sum(axis=2)
    pbc = p.sum(axis=1)
    mask = p > 0.0
    if not mask.any():
        return 0.0
    num = p * pc[:, None, None]
    den = pac[:, :, None] * pbc[:, None, :]
    return float((p[mask] * np.log2(num[mask] / den[mask])).sum())
