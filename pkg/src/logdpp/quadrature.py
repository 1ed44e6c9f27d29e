"""Gauss rules for the Gegenbauer weight and graded-panel integrators for
the log-singular integrals L1, L2 (double) and L3 (single).

All integrals are taken in angle variables x = cos(theta), where the
probability weight becomes c sin(theta)^(2 lam) d theta.  The double
integrals are folded onto theta > phi and written in the rotated
coordinates

    u = (theta - phi) / 2,    v = (theta + phi) / 2 = u + (pi - 2u) t,

so that log 1/|x - y| = -log 2 - log sin u - log sin v separates into
factors that blow up only on the edges of the (u, t) rectangle.  Each
axis carries uniform bulk panels plus geometric panels (ratio 1/2)
toward both ends; 16-point Gauss-Legendre is used on every panel.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .orthopoly import (GegenbauerParam, as_param, orthonormal_offdiag, orthonormal_table,
                        weight_log_constant)
from .tridiag import eigvalsh_tridiagonal

PANEL_ORDER = 16
MAX_DEPTH = 40
MIN_DEPTH = 3
WAVELENGTHS_PER_PANEL = 1.5
_CHUNK_POINTS = 250_000


class ToleranceWarning(RuntimeWarning):
    """The graded integrator hit MAX_DEPTH before meeting its tolerance."""


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    lam: float
    order: int

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class SingularIntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    depth: int = 0
    converged: bool = True


def default_tol(n: int) -> float:
    return 1e-7 if n <= 20 else 1e-5


def default_workers() -> int:
    env = os.environ.get("LOGDPP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@lru_cache(maxsize=64)
def _gauss_rule_cached(lam: float, order: int):
    off = orthonormal_offdiag(lam, order - 1)
    nodes = eigvalsh_tridiagonal(np.zeros(order), off)
    nodes = 0.5 * (nodes - nodes[::-1])
    p = orthonormal_table(lam, order - 1, nodes)
    weights = 1.0 / np.sum(p * p, axis=0)
    weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_rule(lam, order: int) -> QuadratureRule:
    """Gauss rule for the probability weight w^lam (Golub-Welsch).

    Exact for polynomials of degree <= 2 order - 1; weights sum to one.
    """
    param = as_param(lam)
    order = int(order)
    if order < 1:
        raise ValueError("order must be >= 1")
    nodes, weights = _gauss_rule_cached(param.lam, order)
    return QuadratureRule(nodes, weights, param.lam, order)


def gauss_legendre(order: int = PANEL_ORDER):
    """Classical Gauss-Legendre nodes on [-1, 1] (weights sum to 2)."""
    rule = gauss_rule(0.5, order)
    return rule.nodes, 2.0 * rule.weights


@lru_cache(maxsize=4)
def _unit_panel_rule(order: int):
    x, w = gauss_legendre(order)
    return 0.5 * (x + 1.0), 0.5 * w


# ---------------------------------------------------------------------------
# graded panel meshes on [0, 1]
#
# A panel is (side, d0, d1): it spans distances d0 < d1 from the left
# (side 0) or right (side 1) end.  Keeping distances rather than
# coordinates preserves relative accuracy next to the ends.

def _panels(n_bulk: int, depth: int):
    h = 1.0 / n_bulk
    panels = []
    for side in (0, 1):
        panels.append((side, 0.0, h * 2.0 ** -depth))
        for k in range(depth, 0, -1):
            panels.append((side, h * 2.0 ** -k, h * 2.0 ** (1 - k)))
    # bulk panels between the two graded end panels
    for i in range(1, n_bulk - 1):
        panels.append((0, i * h, (i + 1) * h))
    return panels


def _panel_nodes(panels, order=PANEL_ORDER):
    """Nodes s, 1 - s and weights for a list of panels (16 per panel)."""
    xi, wi = _unit_panel_rule(order)
    side = np.array([p[0] for p in panels])[:, None]
    d0 = np.array([p[1] for p in panels])[:, None]
    d1 = np.array([p[2] for p in panels])[:, None]
    dist = d0 + (d1 - d0) * xi[None, :]
    w = (d1 - d0) * wi[None, :]
    s = np.where(side == 0, dist, 1.0 - dist)
    sc = np.where(side == 0, 1.0 - dist, dist)
    return s.ravel(), sc.ravel(), w.ravel()


def _sigmoid(s, sc, q: int):
    """Map [0, 1] to itself with s^q end behaviour; returns (t, 1 - t, dt/ds)."""
    if q == 1:
        return s, sc, np.ones_like(s)
    a = s ** q
    b = sc ** q
    den = a + b
    return a / den, b / den, q * (s * sc) ** (q - 1) / (den * den)


def _power_order(exponent: float) -> int:
    """Smallest map order q making s^(q (exponent + 1) - 1) bounded."""
    if exponent >= 0:
        return 1
    return int(math.ceil(1.0 / (exponent + 1.0) - 1e-12))


def _fsum_columns(values):
    return np.array([math.fsum(col) for col in np.asarray(values).reshape(len(values), -1).T])


# ---------------------------------------------------------------------------
# 1-D graded integration

def integrate_graded_1d(f, length: float, tol: float, n_bulk: int = 8, q: int = 1,
                        max_depth: int = MAX_DEPTH) -> SingularIntegralResult:
    """Integrate ``f(t, length - t)`` over t in [0, length].

    ``f`` receives the point and its distance to the right end so that
    endpoint singularities can be evaluated without cancellation.  The
    sigmoidal map of order ``q`` flattens power singularities; geometric
    grading handles the remaining logarithmic ones.
    """
    cache = {}
    evals = 0

    def value(depth):
        nonlocal evals
        panels = _panels(n_bulk, depth)
        todo = [p for p in panels if p not in cache]
        if todo:
            s, sc, w = _panel_nodes(todo)
            t, tc, dt = _sigmoid(s, sc, q)
            vals = np.asarray(f(length * t, length * tc), dtype=float)
            vals = vals * (length * dt * w)
            per_panel = vals.reshape(len(todo), PANEL_ORDER).sum(axis=1)
            evals += s.size
            for p, v in zip(todo, per_panel):
                cache[p] = v
        return math.fsum(cache[p] for p in panels)

    prev = value(MIN_DEPTH - 1)
    for depth in range(MIN_DEPTH, max_depth + 1):
        cur = value(depth)
        err = abs(cur - prev)
        if err <= 0.5 * tol:
            return SingularIntegralResult(cur, err, evals, depth, True)
        prev = cur
    warnings.warn(f"graded 1-D integral did not reach tol={tol:g} (estimate {err:.3g})",
                  ToleranceWarning, stacklevel=2)
    return SingularIntegralResult(cur, err, evals, max_depth, False)


# ---------------------------------------------------------------------------
# 2-D log-singular integration over [0, pi]^2

class _LogDoubleIntegral:
    """Integrals of smooth(x, y) w(x) w(y) (log 1/|x - y| + offset) dx dy.

    ``smooth`` must be symmetric in (x, y) and may return several
    components stacked on the first axis.
    """

    def __init__(self, lam, smooth, n_components, n_u, n_t, offset=0.0, workers=1):
        self.lam = lam
        self.smooth = smooth
        self.m = n_components
        self.n_u, self.n_t = n_u, n_t
        self.q_u = _power_order(4.0 * lam + 1.0)
        self.q_t = _power_order(2.0 * lam)
        self.offset = offset
        self.c2 = math.exp(2.0 * weight_log_constant(lam))
        self.workers = workers
        self.cache = {}
        self.evaluations = 0

    def _block(self, upanels, tpanels):
        """Per-panel-pair contributions, shape (m, len(upanels), len(tpanels))."""
        su, suc, wu = _panel_nodes(upanels)
        su, suc, du = _sigmoid(su, suc, self.q_u)
        u = 0.5 * math.pi * su
        uc = 0.5 * math.pi * suc
        wu = wu * du * 0.5 * math.pi
        st, stc, wt = _panel_nodes(tpanels)
        t, tc, dt = _sigmoid(st, stc, self.q_t)
        wt = wt * dt

        a = 2.0 * uc[:, None]                # pi - 2u
        phi = a * t[None, :]
        pth = a * tc[None, :]                 # pi - theta
        x = -np.cos(pth)
        y = np.cos(phi)
        v = u[:, None] + phi
        vc = u[:, None] + pth                 # pi - v
        sinv = np.sin(np.minimum(v, vc))
        logterm = (self.offset - math.log(2.0) - np.log(np.sin(u))[:, None]
                   - np.log(sinv))
        # factor 2 folds theta < phi onto theta > phi, 2a is the Jacobian
        wgt = (4.0 * self.c2) * a * wu[:, None] * wt[None, :]
        if self.lam != 0.0:
            wgt = wgt * (np.sin(pth) * np.sin(phi)) ** (2.0 * self.lam)
        s = np.asarray(self.smooth(x, y)).reshape(self.m, u.size, t.size)
        vals = s * (wgt * logterm)[None]
        self.evaluations += u.size * t.size
        return vals.reshape(self.m, len(upanels), PANEL_ORDER,
                            len(tpanels), PANEL_ORDER).sum(axis=(2, 4))

    def _fill(self, upanels, tpanels):
        if not upanels or not tpanels:
            return
        rows = max(1, _CHUNK_POINTS // (PANEL_ORDER * PANEL_ORDER * len(tpanels)))
        chunks = [upanels[i:i + rows] for i in range(0, len(upanels), rows)]
        if self.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                results = list(pool.map(lambda c: self._block(c, tpanels), chunks))
        else:
            results = [self._block(c, tpanels) for c in chunks]
        for chunk, res in zip(chunks, results):
            for i, up in enumerate(chunk):
                for j, tp in enumerate(tpanels):
                    self.cache[(up, tp)] = res[:, i, j]

    def value(self, depth):
        up = _panels(self.n_u, depth)
        tp = _panels(self.n_t, depth)
        new_u = [p for p in up if (p, tp[-1]) not in self.cache]
        old_u = [p for p in up if (p, tp[-1]) in self.cache]
        self._fill(new_u, tp)
        new_t = [p for p in tp if (old_u[0], p) not in self.cache] if old_u else []
        self._fill(old_u, new_t)
        vals = np.array([self.cache[(a, b)] for a in up for b in tp])
        return _fsum_columns(vals)

    def run(self, tol, max_depth=MAX_DEPTH):
        prev = self.value(MIN_DEPTH - 1)
        for depth in range(MIN_DEPTH, max_depth + 1):
            cur = self.value(depth)
            err = np.abs(cur - prev)
            if np.all(err <= 0.5 * tol):
                return cur, err, depth, True
            prev = cur
        warnings.warn(f"graded 2-D integral did not reach tol={tol:g} "
                      f"(estimate {np.max(err):.3g})", ToleranceWarning, stacklevel=3)
        return cur, err, max_depth, False


def _bulk_panels(freq_wavelengths: float, q: int) -> int:
    return int(math.ceil(q * freq_wavelengths / WAVELENGTHS_PER_PANEL)) + 2


def log_double_integral(lam, smooth, n_components=1, degree=0, tol=1e-7, offset=0.0,
                        workers=None):
    """Integrate symmetric ``smooth(x, y)`` against w(x) w(y) log 1/|x-y|.

    ``degree`` bounds the polynomial degree of ``smooth`` in each variable
    and sets the bulk panel count.  Returns one SingularIntegralResult per
    component.
    """
    lam = as_param(lam).lam
    workers = default_workers() if workers is None else workers
    # theta-frequency `degree` gives degree/2 wavelengths on [0, pi/2] in u
    # (frequency 2 degree) and up to `degree` wavelengths in t.
    n_u = _bulk_panels(0.5 * degree + 0.5, _power_order(4.0 * lam + 1.0))
    n_t = _bulk_panels(degree + 1.0, _power_order(2.0 * lam))
    integ = _LogDoubleIntegral(lam, smooth, n_components, n_u, n_t, offset, workers)
    val, err, depth, ok = integ.run(tol)
    return [SingularIntegralResult(float(v), float(e), integ.evaluations, depth, ok)
            for v, e in zip(val, err)]


# ---------------------------------------------------------------------------
# the energy integrals

def kernel_sums(lam: float, n: int, x, y):
    """(K(x,x), K(y,y), K(x,y)) in one orthonormal-recurrence pass."""
    b = orthonormal_offdiag(lam, n + 1)
    px_prev = np.zeros_like(x)
    py_prev = np.zeros_like(y)
    px = np.ones_like(x)
    py = np.ones_like(y)
    kxx = np.ones_like(x)
    kyy = np.ones_like(y)
    kxy = np.ones(np.broadcast(x, y).shape)
    for k in range(n):
        bprev = b[k - 1] if k > 0 else 0.0
        px, px_prev = (x * px - bprev * px_prev) / b[k], px
        py, py_prev = (y * py - bprev * py_prev) / b[k], py
        kxx += px * px
        kyy += py * py
        kxy += px * py
    return kxx, kyy, kxy


def _energy_smooth(lam, n):
    def smooth(x, y):
        kxx, kyy, kxy = kernel_sums(lam, n, x, y)
        return np.stack([kxx * kyy, kxy * kxy])
    return smooth


def _check_inputs(lam, n, tol):
    param = as_param(lam)
    if int(n) < 0:
        raise ValueError("n must be non-negative")
    if tol is None:
        tol = default_tol(int(n))
    if not tol > 0:
        raise ValueError("tol must be positive")
    return param.lam, int(n), float(tol)


@lru_cache(maxsize=128)
def _energy_integrals(lam, n, tol):
    return tuple(log_double_integral(lam, _energy_smooth(lam, n), 2, 2 * n, tol))


def integrate_L1(lam, n, tol=None) -> SingularIntegralResult:
    """Double integral of K(x,x) K(y,y) w(x) w(y) log 1/|x-y|."""
    lam, n, tol = _check_inputs(lam, n, tol)
    return _energy_integrals(lam, n, tol)[0]


def integrate_L2(lam, n, tol=None) -> SingularIntegralResult:
    """Double integral of K(x,y)^2 w(x) w(y) log 1/|x-y|."""
    lam, n, tol = _check_inputs(lam, n, tol)
    return _energy_integrals(lam, n, tol)[1]


def expected_energy_result(lam, n, tol=None) -> SingularIntegralResult:
    lam, n, tol = _check_inputs(lam, n, tol)
    l1, l2 = _energy_integrals(lam, n, tol)
    return SingularIntegralResult(l1.value - l2.value, l1.error_estimate + l2.error_estimate,
                                  l1.evaluations, l1.depth, l1.converged and l2.converged)


def expected_energy_numeric(lam, n, tol=None) -> float:
    """Expected log-energy of the (n+1)-point Gegenbauer DPP, L1 - L2."""
    return expected_energy_result(lam, n, tol).value


def integrate_L3(lam, n, tol=None) -> SingularIntegralResult:
    """Single integral of K(x,x) w(x) log 1/(1 - x^2)."""
    lam, n, tol = _check_inputs(lam, n, tol)
    c = math.exp(weight_log_constant(lam))

    def f(theta, theta_c):
        sin_t = np.sin(np.minimum(theta, theta_c))
        x = np.where(theta <= theta_c, np.cos(theta), -np.cos(theta_c))
        p = orthonormal_table(lam, n, x)
        k = np.sum(p * p, axis=0)
        return k * c * sin_t ** (2.0 * lam) * (-2.0 * np.log(sin_t))

    q = _power_order(2.0 * lam)
    return integrate_graded_1d(f, math.pi, tol, n_bulk=_bulk_panels(n + 1.0, q), q=q)


def mixed_moment_J(k: int, l: int, tol=1e-8) -> SingularIntegralResult:
    """Chebyshev moment J_{k,l}: C_k(x)^2 C_l(y)^2 against w w log 1/(2|x-y|)."""
    k, l = int(k), int(l)
    n = max(k, l)

    def smooth(x, y):
        px = orthonormal_table(0.0, n, x)
        py = orthonormal_table(0.0, n, y)
        return 0.5 * (px[k] ** 2 * py[l] ** 2 + px[l] ** 2 * py[k] ** 2)

    return log_double_integral(0.0, smooth, 1, 2 * n, tol, offset=-math.log(2.0))[0]


__all__ = [
    "QuadratureRule", "SingularIntegralResult", "ToleranceWarning", "gauss_rule",
    "gauss_legendre", "integrate_graded_1d", "log_double_integral", "kernel_sums",
    "integrate_L1", "integrate_L2", "integrate_L3", "expected_energy_numeric",
    "expected_energy_result", "mixed_moment_J", "default_tol", "GegenbauerParam",
]
