"""Exact sampling of the (n+1)-point Gegenbauer projection DPP and Monte
Carlo estimation of its expected logarithmic energy.

Sampling is sequential.  With phi(x) the vector of orthonormal
polynomials p_0..p_n and Q an orthonormal basis of the feature vectors of
the points chosen so far, the next point has density

    (|phi(x)|^2 - |Q phi(x)|^2) w(x) / (n + 1 - t).

It is drawn by rejection from the one-point intensity |phi(x)|^2 w / (n+1)
(accept with probability |(I - Q^T Q) phi|^2 / |phi|^2), which is exact.
The one-point intensity itself is drawn by inverse CDF in a coordinate U
where its density is bounded (see ``_coordinate_index``), tabulated once
per kernel on a graded panel grid with cubic Hermite interpolation of the
CDF, refined by doubling until the interpolation error is below 1e-8.

Random streams: sample index i belongs to block i // block_size, and block
b draws from ``np.random.default_rng(SeedSequence(seed, spawn_key=(b,)))``.
Block means are merged in a fixed pairwise tree, so results do not depend
on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special, stats

from .fekete import PointConfiguration, Provenance
from .orthopoly import KernelContext, orthonormal_table, weight, weight_log_constant
from .quadrature import default_workers

CLAMP_TOLERANCE = 1e-12
GRID_PANELS = 4096
GRID_TOLERANCE = 1e-8
DEFAULT_BLOCK = 4096
_GRID_ORDER = 16
_MAX_GRID_PANELS = 1 << 20
_END_REFINEMENT = 40  # geometric panels toward each end of the U grid


class NegativeDensityError(ArithmeticError):
    """A conditional density fell below -CLAMP_TOLERANCE."""


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    num_samples: int

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be >= 1")
        if not self.std_error >= 0:
            raise ValueError("std_error must be non-negative")


# ---------------------------------------------------------------------------
# the sampling coordinate
#
# U is the CDF coordinate of the Beta(b, b) law on [-1, 1] with b = lam + 1/2
# when lam < 0 and b = 1/2 (arcsine, U = theta / pi reversed) otherwise.  In
# U the one-point intensity is K(x,x) w(x) / (w_b(x) (n+1)), which is bounded
# in both cases.

def _coordinate_index(lam: float) -> float:
    return lam + 0.5 if lam < 0 else 0.5


def _x_of_u(b: float, u):
    """Point x and 1 - x^2 at CDF coordinate u of the Beta(b, b) law."""
    u = np.asarray(u, dtype=float)
    if b == 0.5:
        return -np.cos(math.pi * u), np.sin(math.pi * u) ** 2
    lower = u <= 0.5
    # evaluate each half from its own end to keep relative accuracy there
    b_lo = special.betaincinv(b, b, np.where(lower, u, 0.5))
    b_hi = special.betaincinv(b, b, np.where(lower, 0.5, 1.0 - u))
    x = np.where(lower, 2.0 * b_lo - 1.0, 1.0 - 2.0 * b_hi)
    near = np.where(lower, b_lo, b_hi)
    return x, 4.0 * near * (1.0 - near)


def _u_of_x(b: float, x):
    x = np.asarray(x, dtype=float)
    if b == 0.5:
        return np.arccos(-x) / math.pi
    return special.betainc(b, b, 0.5 * (1.0 + x))


def _clamp_density(values):
    values = np.asarray(values, dtype=float)
    if np.any(values < -CLAMP_TOLERANCE):
        raise NegativeDensityError(f"conditional density {values.min():.3e} below tolerance")
    return np.maximum(values, 0.0)


# ---------------------------------------------------------------------------
# tabulated one-point intensity

@dataclass(frozen=True)
class _IntensityTable:
    b: float             # index of the Beta law defining the U coordinate
    n: int
    lam: float
    breaks: np.ndarray   # panel boundaries in U
    cdf: np.ndarray      # normalised CDF at the boundaries
    slope: np.ndarray    # density in U at the boundaries (normalised)
    mass: float          # raw total mass, should be 1
    max_error: float

    def invert(self, v):
        """U with CDF(U) = v via the Hermite cubic on each panel."""
        v = np.asarray(v, dtype=float)
        i = np.clip(np.searchsorted(self.cdf, v, side="right") - 1, 0, self.breaks.size - 2)
        h = self.breaks[i + 1] - self.breaks[i]
        g0, g1 = self.cdf[i], self.cdf[i + 1]
        d0, d1 = self.slope[i] * h, self.slope[i + 1] * h
        span = g1 - g0
        s = np.clip(np.where(span > 0, (v - g0) / np.where(span > 0, span, 1.0), 0.5), 0.0, 1.0)
        lo, hi = np.zeros_like(s), np.ones_like(s)
        for _ in range(30):
            val, der = _hermite(s, g0, g1, d0, d1)
            r = val - v
            lo = np.where(r < 0, s, lo)
            hi = np.where(r >= 0, s, hi)
            step = s - r / np.where(der > 0, der, np.inf)
            # Newton where it stays inside the bracket, bisection otherwise
            s_new = np.where((step > lo) & (step < hi), step, 0.5 * (lo + hi))
            if np.all(np.abs(s_new - s) <= 1e-15):
                s = s_new
                break
            s = s_new
        return self.breaks[i] + s * h

    def cdf_at(self, u):
        u = np.asarray(u, dtype=float)
        i = np.clip(np.searchsorted(self.breaks, u, side="right") - 1, 0, self.breaks.size - 2)
        h = self.breaks[i + 1] - self.breaks[i]
        s = (u - self.breaks[i]) / h
        val, _ = _hermite(s, self.cdf[i], self.cdf[i + 1], self.slope[i] * h,
                          self.slope[i + 1] * h)
        return val


def _hermite(s, g0, g1, d0, d1):
    s2 = s * s
    s3 = s2 * s
    val = ((2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * d0
           + (-2 * s3 + 3 * s2) * g1 + (s3 - s2) * d1)
    der = (6 * s2 - 6 * s) * (g0 - g1) + (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1
    return val, der


def _grid_breaks(m: int) -> np.ndarray:
    inner = np.linspace(0.0, 1.0, m + 1)
    h = 1.0 / m
    ends = h * 0.5 ** np.arange(1, _END_REFINEMENT + 1)
    return np.unique(np.concatenate((inner, ends, 1.0 - ends)))


def _density_u(lam, n, b, u):
    """One-point intensity in the U coordinate (integrates to one)."""
    x, one_minus_x2 = _x_of_u(b, u)
    p = orthonormal_table(lam, n, x)
    dens = np.sum(p * p, axis=0) / (n + 1)
    if b != lam + 0.5:
        log_ratio = weight_log_constant(lam) - weight_log_constant(b - 0.5)
        dens = dens * math.exp(log_ratio) * one_minus_x2 ** (lam + 0.5 - b)
    return dens


def _panel_integrals(lam, n, b, lo, hi):
    """Gauss-Legendre integral of the U-density over each [lo_k, hi_k]."""
    from .quadrature import gauss_legendre

    gx, gw = gauss_legendre(_GRID_ORDER)
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * gx[None, :]
    vals = _density_u(lam, n, b, nodes.ravel()).reshape(nodes.shape)
    return half * (vals @ gw)


@lru_cache(maxsize=32)
def _intensity_table(lam: float, n: int) -> _IntensityTable:
    a = _coordinate_index(lam)
    m = GRID_PANELS
    while True:
        breaks = _grid_breaks(m)
        lo, hi = breaks[:-1], breaks[1:]
        masses = _panel_integrals(lam, n, a, lo, hi)
        cdf = np.concatenate(([0.0], np.cumsum(masses)))
        slope = _density_u(lam, n, a, breaks)
        mass = float(cdf[-1])
        # Hermite CDF vs quadrature at the panel midpoints
        mid = 0.5 * (lo + hi)
        exact_mid = cdf[:-1] + _panel_integrals(lam, n, a, lo, mid)
        herm_mid, _ = _hermite(0.5, cdf[:-1], cdf[1:], slope[:-1] * (hi - lo),
                               slope[1:] * (hi - lo))
        err = max(float(np.max(np.abs(herm_mid - exact_mid))), abs(mass - 1.0))
        if err < GRID_TOLERANCE or m >= _MAX_GRID_PANELS:
            break
        m *= 2
    if err >= GRID_TOLERANCE:
        raise ArithmeticError(f"intensity grid did not reach {GRID_TOLERANCE} (got {err:.2e})")
    for arr in (breaks, cdf, slope):
        arr.setflags(write=False)
    return _IntensityTable(a, n, lam, breaks, cdf / mass, slope / mass, mass, err)


# ---------------------------------------------------------------------------
# sampler state

@dataclass
class SamplerState:
    """Partial sample: the points chosen so far and an orthonormal basis
    (rows of ``orth_coeffs``) of their feature vectors."""

    ctx: KernelContext
    selected: PointConfiguration = field(default_factory=lambda: PointConfiguration(()))
    orth_coeffs: np.ndarray = None
    rng_seed: int = 0

    def __post_init__(self):
        dim = self.ctx.n + 1
        if self.orth_coeffs is None:
            self.orth_coeffs = np.empty((0, dim))
        if len(self.selected) > dim:
            raise ValueError("more points than the kernel rank")
        if self.orth_coeffs.shape != (len(self.selected), dim):
            raise ValueError("orth_coeffs must have one row per selected point")

    @classmethod
    def from_points(cls, ctx: KernelContext, points, rng_seed: int = 0) -> "SamplerState":
        state = cls(ctx, rng_seed=rng_seed)
        for x in points:
            state.add_point(x)
        return state

    @property
    def remaining(self) -> int:
        return self.ctx.n + 1 - len(self.selected)

    def features(self, x):
        return orthonormal_table(self.ctx.lam, self.ctx.n, x)

    def add_point(self, x: float):
        if self.remaining == 0:
            raise ValueError("sample already complete")
        phi = self.features(float(x))
        r = phi - self.orth_coeffs.T @ (self.orth_coeffs @ phi)
        r = r - self.orth_coeffs.T @ (self.orth_coeffs @ r)
        norm = math.sqrt(float(r @ r))
        if norm == 0.0:
            raise ValueError("point has zero conditional density")
        self.orth_coeffs = np.vstack((self.orth_coeffs, r / norm))
        self.selected = PointConfiguration.from_unsorted(self.selected.points + (float(x),),
                                                         Provenance.DPP_SAMPLE)

    def conditional_kernel_diagonal(self, x):
        """K(x,x) - |Q phi(x)|^2, clamped at the roundoff tolerance."""
        phi = self.features(x)
        proj = np.tensordot(self.orth_coeffs, phi, axes=(1, 0))
        return _clamp_density(np.sum(phi * phi, axis=0) - np.sum(proj * proj, axis=0))

    def conditional_density(self, x):
        """Density in x of the next point given the selected ones."""
        if self.remaining == 0:
            raise ValueError("sample already complete")
        return self.conditional_kernel_diagonal(x) * weight(self.ctx.param, x) / self.remaining

    def conditional_mass(self) -> float:
        """Integral of conditional_density over the sampling grid."""
        table = _intensity_table(self.ctx.lam, self.ctx.n)
        from .quadrature import gauss_legendre

        gx, gw = gauss_legendre(_GRID_ORDER)
        lo, hi = table.breaks[:-1], table.breaks[1:]
        half = 0.5 * (hi - lo)
        u = ((0.5 * (hi + lo))[:, None] + half[:, None] * gx[None, :]).ravel()
        x, one_minus_x2 = _x_of_u(table.b, u)
        # w(x) dx = (w / w_b)(x) dU
        ratio = math.exp(weight_log_constant(self.ctx.lam) - weight_log_constant(table.b - 0.5))
        ratio = ratio * one_minus_x2 ** (self.ctx.lam + 0.5 - table.b)
        vals = (self.conditional_kernel_diagonal(x) * ratio / self.remaining).reshape(-1, gx.size)
        return float(math.fsum(half * (vals @ gw)))


# ---------------------------------------------------------------------------
# vectorised block sampler

def _sample_block(ctx: KernelContext, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent samples, shape (size, n + 1), rows sorted."""
    lam, n = ctx.lam, ctx.n
    dim = n + 1
    table = _intensity_table(lam, n)
    points = np.empty((size, dim))
    basis = np.zeros((size, dim, dim))
    for t in range(dim):
        todo = np.arange(size)
        while todo.size:
            u = table.invert(rng.random(todo.size))
            x, _ = _x_of_u(table.b, u)
            coin = rng.random(todo.size)
            phi = orthonormal_table(lam, n, x).T
            q = basis[todo, :t, :]
            r = phi - np.einsum("sji,sj->si", q, np.einsum("sji,si->sj", q, phi))
            rr = np.einsum("si,si->s", r, r)
            pp = np.einsum("si,si->s", phi, phi)
            ok = coin * pp < rr
            if np.any(ok):
                idx = todo[ok]
                rk = r[ok]
                qk = q[ok]
                rk = rk - np.einsum("sji,sj->si", qk, np.einsum("sji,si->sj", qk, rk))
                basis[idx, t, :] = rk / np.sqrt(np.einsum("si,si->s", rk, rk))[:, None]
                points[idx, t] = x[ok]
            todo = todo[~ok]
    points.sort(axis=1)
    return points


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def sample(ctx: KernelContext, seed: int) -> PointConfiguration:
    """One exact draw of the (n+1)-point projection DPP.

    For lam near -1/2 a point within 1e-16 of an end rounds to -1 or +1;
    coincident points are treated as an error.
    """
    pts = _sample_block(ctx, np.random.default_rng(seed), 1)[0]
    if np.any(np.diff(pts) <= 0):
        raise ArithmeticError("sampler produced coincident points")
    return PointConfiguration(tuple(pts), Provenance.DPP_SAMPLE)


def _energies(points: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(points.shape[1], k=1)
    gaps = points[:, j] - points[:, i]
    if np.any(gaps < 1e-15):
        raise ArithmeticError("coincident points in a DPP sample")
    return -2.0 * np.sum(np.log(gaps), axis=1)


def _block_sizes(num_samples: int, block_size: int):
    full, rest = divmod(num_samples, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _block_moments(ctx, seed, block, size):
    e = _energies(_sample_block(ctx, _block_rng(seed, block), size))
    mean = float(np.mean(e))
    return size, mean, float(np.sum((e - mean) ** 2))


def _merge(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _tree_reduce(parts):
    while len(parts) > 1:
        merged = [_merge(parts[k], parts[k + 1]) for k in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def mc_expected_energy(ctx: KernelContext, num_samples: int, seed: int,
                       block_size: int = DEFAULT_BLOCK, workers=None) -> McEstimate:
    """Monte Carlo mean of the logarithmic energy of DPP samples."""
    num_samples = int(num_samples)
    if num_samples < 2:
        raise ValueError("num_samples must be >= 2")
    sizes = _block_sizes(num_samples, int(block_size))
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = [(ctx, seed, b, s) for b, s in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _block_moments(*job), jobs))
    else:
        parts = [_block_moments(*job) for job in jobs]
    count, mean, m2 = _tree_reduce(parts)
    std = math.sqrt(m2 / (count - 1))
    return McEstimate(mean, std / math.sqrt(count), count)


def sample_many(ctx: KernelContext, num_samples: int, seed: int,
                block_size: int = DEFAULT_BLOCK) -> np.ndarray:
    """All points of ``num_samples`` draws, shape (num_samples, n + 1)."""
    blocks = [_sample_block(ctx, _block_rng(seed, b), s)
              for b, s in enumerate(_block_sizes(int(num_samples), int(block_size)))]
    return np.concatenate(blocks, axis=0)


@dataclass(frozen=True)
class IntensityHistogram:
    rows: list           # (bin_lo, bin_hi, empirical, theoretical)
    chi_square: float
    p_value: float
    num_samples: int


def intensity_mass(ctx: KernelContext, x_lo, x_hi):
    """Expected number of points in [x_lo, x_hi]: the integral of K(x,x) w."""
    table = _intensity_table(ctx.lam, ctx.n)
    u_lo, u_hi = _u_of_x(table.b, x_lo), _u_of_x(table.b, x_hi)
    out = []
    for a, b in zip(np.atleast_1d(u_lo), np.atleast_1d(u_hi)):
        inner = table.breaks[(table.breaks > a) & (table.breaks < b)]
        cuts = np.concatenate(([a], inner, [b]))
        parts = _panel_integrals(ctx.lam, ctx.n, table.b, cuts[:-1], cuts[1:])
        out.append((ctx.n + 1) * math.fsum(parts))
    return np.array(out)


def intensity_histogram(ctx: KernelContext, num_samples: int, bins: int,
                        seed: int) -> IntensityHistogram:
    """Empirical vs theoretical mean counts per sample on equal-width bins
    of [-1, 1], with a chi-square goodness-of-fit test."""
    bins = int(bins)
    if bins < 10:
        raise ValueError("bins must be >= 10")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    pts = sample_many(ctx, num_samples, seed)
    counts, _ = np.histogram(pts.ravel(), bins=edges)
    theory = intensity_mass(ctx, edges[:-1], edges[1:])
    expected = theory * num_samples
    expected = expected * counts.sum() / expected.sum()
    chi2, pval = stats.chisquare(counts, expected)
    rows = [(float(edges[k]), float(edges[k + 1]), counts[k] / num_samples, float(theory[k]))
            for k in range(bins)]
    return IntensityHistogram(rows, float(chi2), float(pval), int(num_samples))
