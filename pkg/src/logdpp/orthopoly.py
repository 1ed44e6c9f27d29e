"""Gegenbauer and Jacobi(1,1) polynomials, the Gegenbauer weight and the
Christoffel-Darboux projection kernel.

The weight is normalised to a probability density on [-1, 1]::

    w(x) = Gamma(lam + 1) / (sqrt(pi) Gamma(lam + 1/2)) (1 - x^2)^(lam - 1/2)

``lam = 0`` is the Chebyshev (arcsine) case and is handled by its own
branch, since the classical Gegenbauer normalisation degenerates there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import log_gamma, log_pochhammer


@dataclass(frozen=True)
class GegenbauerParam:
    lam: float
    is_chebyshev: bool = field(init=False)

    def __post_init__(self):
        lam = float(self.lam)
        if not lam > -0.5:
            raise ValueError(f"Gegenbauer index must exceed -1/2, got {lam}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "is_chebyshev", lam == 0.0)


def as_param(lam) -> GegenbauerParam:
    if isinstance(lam, GegenbauerParam):
        return lam
    return GegenbauerParam(lam)


def weight_log_constant(lam: float) -> float:
    """log of Gamma(lam+1) / (sqrt(pi) Gamma(lam+1/2))."""
    return log_gamma(lam + 1.0) - 0.5 * math.log(math.pi) - log_gamma(lam + 0.5)


def weight(param, x):
    """Probability density w^lam at x (scalar or array)."""
    param = as_param(param)
    lam = param.lam
    x = np.asarray(x, dtype=float)
    if lam < 0.5 and np.any(np.abs(x) >= 1.0):
        raise ValueError("weight is infinite at |x| = 1 for lam < 1/2")
    if np.any(np.abs(x) > 1.0):
        raise ValueError("weight is supported on [-1, 1]")
    c = math.exp(weight_log_constant(lam))
    out = c * (1.0 - x * x) ** (lam - 0.5)
    return float(out) if out.ndim == 0 else out


def weight_theta(lam: float, theta):
    """Density of theta = arccos(x): w(cos t) sin t = c sin(t)^(2 lam)."""
    c = math.exp(weight_log_constant(lam))
    return c * np.sin(theta) ** (2.0 * lam)


def recurrence_beta(lam: float, k: int) -> float:
    """Monic recurrence coefficient: p_{k+1} = x p_k - beta_k p_{k-1}."""
    if k == 1:
        return 1.0 / (2.0 * (lam + 1.0))
    return k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0))


def orthonormal_offdiag(lam: float, n: int) -> np.ndarray:
    """sqrt(beta_k) for k = 1..n; the Jacobi-matrix off-diagonal."""
    return np.sqrt([recurrence_beta(lam, k) for k in range(1, n + 1)])


def orthonormal_table(lam: float, n: int, x) -> np.ndarray:
    """Rows p_0(x), ..., p_n(x) of the orthonormal basis (positive leading
    coefficients).  Shape ``(n + 1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    b = orthonormal_offdiag(lam, n + 1)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x / b[0]
    for k in range(1, n):
        out[k + 1] = (x * out[k] - b[k - 1] * out[k - 1]) / b[k]
    return out


def gegenbauer(param, k: int, x):
    """C_k^lam(x); for lam = 0 the Chebyshev polynomial T_k(x)."""
    param = as_param(param)
    lam = param.lam
    k = int(k)
    if k < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    if param.is_chebyshev:
        # recurrence rather than cos(k arccos x) so |x| > 1 also works
        prev, cur = np.ones_like(x), x.copy()
        if k == 0:
            cur = prev
        for _ in range(1, k):
            prev, cur = cur, 2.0 * x * cur - prev
        return float(cur) if cur.ndim == 0 else cur
    prev = np.ones_like(x)
    if k == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = 2.0 * lam * x
    for m in range(2, k + 1):
        prev, cur = cur, (2.0 * x * (m + lam - 1.0) * cur - (m + 2.0 * lam - 2.0) * prev) / m
    return float(cur) if cur.ndim == 0 else cur


def log_norm_constant(lam: float, k: int) -> float:
    """log gamma_k^lam with gamma_k^2 = k! (k + lam) / (lam (2 lam)_k)."""
    if k == 0:
        return 0.0
    if lam == 0.0:
        return 0.5 * math.log(2.0)
    lp, sp = log_pochhammer(2.0 * lam, k)
    # for lam < 0 both lam and (2 lam)_k are negative
    if sp * (1 if lam > 0 else -1) <= 0:
        raise ValueError("normalisation constant is not real")
    return 0.5 * (log_gamma(k + 1.0) + math.log(k + lam) - math.log(abs(lam)) - lp)


@dataclass(frozen=True)
class KernelContext:
    """Precomputed constants of the rank-(n+1) projection kernel K_n^lam."""

    param: GegenbauerParam
    n: int
    log_norm_constants: tuple
    cd_prefactor_log: float
    cd_prefactor_sign: int

    @classmethod
    def build(cls, lam, n: int) -> "KernelContext":
        param = as_param(lam)
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        logs = tuple(log_norm_constant(param.lam, k) for k in range(n + 1))
        if param.is_chebyshev:
            pre_log, pre_sign = 0.0, 1
        else:
            # (n+1)! / (2 lam (2 lam)_n), tracked as sign * exp(log|.|)
            lp, sp = log_pochhammer(2.0 * param.lam, n)
            pre_log = log_gamma(n + 2.0) - math.log(2.0 * abs(param.lam)) - lp
            pre_sign = sp * (1 if param.lam > 0 else -1)
        if not all(math.isfinite(v) for v in logs):
            raise ValueError("non-finite normalisation constant")
        return cls(param, n, logs, pre_log, pre_sign)

    @property
    def lam(self) -> float:
        return self.param.lam

    @property
    def cd_switch_threshold(self) -> float:
        return 1e-3 * 2.0 / (self.n + 1)


def gegenbauer_normalized(ctx: KernelContext, k: int, x):
    """gamma_k C_k^lam(x); for lam = 0, 1 at k = 0 and sqrt(2) T_k(x).

    For lam < 0 the leading coefficient of C_k^lam (k >= 1) is negative, so
    this is minus the orthonormal polynomial of ``orthonormal_table``.
    """
    if not 0 <= k <= ctx.n:
        raise IndexError(f"degree {k} outside 0..{ctx.n}")
    return math.exp(ctx.log_norm_constants[k]) * gegenbauer(ctx.param, k, x)


def jacobi11(m: int, x):
    """P_m^(1,1)(x) by the three-term recurrence."""
    m = int(m)
    if m < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if m == 0:
        return float(prev) if prev.ndim == 0 else prev
    cur = 2.0 * x
    # (k+1)(k+3) P_{k+1} = (k+2)(2k+3) x P_k - (k+1)(k+2) P_{k-1}
    for k in range(1, m):
        prev, cur = cur, ((k + 2.0) * (2 * k + 3.0) * x * cur
                          - (k + 1.0) * (k + 2.0) * prev) / ((k + 1.0) * (k + 3.0))
    return float(cur) if cur.ndim == 0 else cur


def kernel_diagonal(ctx: KernelContext, x):
    """K_n(x, x) = sum_k C_hat_k(x)^2."""
    p = orthonormal_table(ctx.lam, ctx.n, x)
    return np.sum(p * p, axis=0)


def _kernel_direct(ctx, x, y):
    px = orthonormal_table(ctx.lam, ctx.n, x)
    py = orthonormal_table(ctx.lam, ctx.n, y)
    return np.sum(px * py, axis=0)


def _kernel_christoffel_darboux(ctx, x, y):
    n = ctx.n
    if ctx.param.is_chebyshev:
        # 1 + 2 sum cos(j t) cos(j s) via the Chebyshev CD formula
        tn1x, tnx = gegenbauer(ctx.param, n + 1, x), gegenbauer(ctx.param, n, x)
        tn1y, tny = gegenbauer(ctx.param, n + 1, y), gegenbauer(ctx.param, n, y)
        return (tn1x * tny - tnx * tn1y) / (x - y)
    cn1x, cnx = gegenbauer(ctx.param, n + 1, x), gegenbauer(ctx.param, n, x)
    cn1y, cny = gegenbauer(ctx.param, n + 1, y), gegenbauer(ctx.param, n, y)
    pre = ctx.cd_prefactor_sign * math.exp(ctx.cd_prefactor_log)
    return pre * (cn1x * cny - cnx * cn1y) / (x - y)


def kernel(ctx: KernelContext, x, y):
    """Projection kernel K_n^lam(x, y).

    Uses the Christoffel-Darboux quotient away from the diagonal and the
    direct orthonormal sum within ``ctx.cd_switch_threshold`` of it.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    # order-independent evaluation keeps K(x, y) == K(y, x) bit for bit
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    near = (hi - lo) <= ctx.cd_switch_threshold
    out = np.empty(x.shape)
    if np.any(near):
        out[near] = _kernel_direct(ctx, lo[near], hi[near])
    if np.any(~near):
        out[~near] = _kernel_christoffel_darboux(ctx, lo[~near], hi[~near])
    return float(out) if out.ndim == 0 else out
