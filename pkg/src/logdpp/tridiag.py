"""Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.

Shared by the Fekete-point solver and the Golub-Welsch quadrature rules.
All eigenvalues are bracketed at once, so the Python loop runs over the
matrix dimension and the bisection steps while numpy handles the
eigenvalue axis.
"""

from __future__ import annotations

import numpy as np

_MAX_STEPS = 200


def sturm_count(diag, offdiag, x):
    """Number of eigenvalues strictly below each entry of ``x``."""
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(offdiag, dtype=float) ** 2
    x = np.asarray(x, dtype=float)
    # pivmin guards exact zero pivots (LAPACK dstebz convention).
    scale = max(1.0, float(np.max(np.abs(diag), initial=0.0)),
                float(np.max(off2, initial=0.0)))
    pivmin = np.finfo(float).tiny * scale
    count = np.zeros(x.shape, dtype=np.int64)
    q = diag[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, diag.size):
        q = diag[i] - x - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def eigvalsh_tridiagonal(diag, offdiag):
    """All eigenvalues (ascending) of the symmetric tridiagonal matrix.

    ``offdiag`` has length ``len(diag) - 1``.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    m = diag.size
    if m == 0:
        return np.empty(0)
    if offdiag.size != m - 1:
        raise ValueError("offdiag must have length len(diag) - 1")
    if m == 1:
        return diag.copy()
    # Gershgorin bracket
    radius = np.zeros(m)
    radius[:-1] += np.abs(offdiag)
    radius[1:] += np.abs(offdiag)
    lo_all = float(np.min(diag - radius))
    hi_all = float(np.max(diag + radius))
    span = max(hi_all - lo_all, 1e-300)
    lo_all -= 1e-12 * span
    hi_all += 1e-12 * span

    k = np.arange(m)
    lo = np.full(m, lo_all)
    hi = np.full(m, hi_all)
    eps = np.finfo(float).eps
    for _ in range(_MAX_STEPS):
        mid = 0.5 * (lo + hi)
        below = sturm_count(diag, offdiag, mid) > k
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        width = hi - lo
        if np.all(width <= 2.0 * eps * np.maximum(np.abs(lo), np.abs(hi)) + 1e-300):
            break
    return 0.5 * (lo + hi)
