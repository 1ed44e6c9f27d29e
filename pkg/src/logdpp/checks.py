"""Numerical oracles for the identities behind the closed forms, and the
check suites run by ``logdpp verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closedform as cf
from .fekete import (discriminant_log, epsilon_exact, fekete_points, jacobi11_zeros,
                     leading_coefficient_log, log_energy)
from .orthopoly import KernelContext, kernel, kernel_diagonal
from .quadrature import (gauss_legendre, gauss_rule, integrate_graded_1d, integrate_L1,
                         integrate_L2, integrate_L3, mixed_moment_J)
from .specfun import EULER_GAMMA, LOG2, harmonic, sine_integral


@dataclass(frozen=True)
class Check:
    check_id: str
    expected: float
    observed: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.observed - self.expected) <= self.tolerance


# ---------------------------------------------------------------------------
# 1-D oracles

def cos_log_quadrature(k: int, l: int = 0, tol: float = 1e-10) -> float:
    """(1/pi) int_{-pi}^{pi} cos(k a) cos(l a) log 1/sqrt(2 - 2 cos a) da by
    graded quadrature (the integrand is even, singular only at a = 0)."""

    def f(a, _):
        return (2.0 / math.pi) * np.cos(k * a) * np.cos(l * a) * (-LOG2 - np.log(np.sin(0.5 * a)))

    return integrate_graded_1d(f, math.pi, tol, n_bulk=max(8, 2 * (k + l))).value


def log_sine_integral(tol: float = 1e-11) -> float:
    """int_0^pi log 1/(2 sin v) dv, which vanishes."""

    def f(v, vc):
        return -LOG2 - np.log(np.sin(np.minimum(v, vc)))

    return integrate_graded_1d(f, math.pi, tol).value


def si_log_residual(x: float) -> float:
    """int_0^x Si(t)/t dt - (pi/2) log x - gamma pi / 2."""
    gx, gw = gauss_legendre(16)
    edges = np.linspace(0.0, x, int(math.ceil(x)) + 1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    t = (0.5 * (hi + lo))[:, None] + half[:, None] * gx[None, :]
    vals = sine_integral(t.ravel()).reshape(t.shape) / t
    total = math.fsum(half * (vals @ gw))
    return total - 0.5 * math.pi * math.log(x) - 0.5 * EULER_GAMMA * math.pi


def harmonic_block_direct(n: int) -> float:
    k = np.arange(2, n + 1)
    # H_{2k-1} for all k at once from one cumulative sum of 1/j
    h = np.cumsum(1.0 / np.arange(1, 2 * n))
    return math.fsum(h[2 * k - 2])


def power_moment_log_derivative(lam, k: int, h: float = 2e-4) -> float:
    """d/ds log of the power moment at s = 0 from forward differences.

    The moment's finite sum cancels terms of size 1/s, so tiny steps lose
    digits; quotients at h, 2h and 4h are Richardson-extrapolated to
    O(h^3) instead.
    """
    base = cf.jacobi_power_moment(lam, k, 0.0)
    d1, d2, d4 = ((cf.jacobi_power_moment(lam, k, m * h) - base) / (m * h) for m in (1, 2, 4))
    return ((8.0 * d1 - 6.0 * d2 + d4) / 3.0) / base


# ---------------------------------------------------------------------------
# suites

def lemma_checks():
    out = []
    for k in range(1, 9):
        out.append(Check(f"lemA4_plain_k{k}", cf.cos_log_integral(k, 0),
                         cos_log_quadrature(k, 0), 1e-7))
        out.append(Check(f"lemA4_squared_k{k}", cf.cos_log_integral(k, k),
                         cos_log_quadrature(k, k), 1e-7))
        for l in range(1, k):
            out.append(Check(f"lemA4_mixed_k{k}_l{l}", cf.cos_log_integral(k, l),
                             cos_log_quadrature(k, l), 1e-7))
    for n in (2, 3, 10, 100, 10_000):
        out.append(Check(f"lemA5_n{n}", cf.harmonic_block_sum(n), harmonic_block_direct(n), 1e-9))
    out.append(Check("lemA8", 0.0, log_sine_integral(), 1e-8))
    out.append(Check("lemA10_x10000", 0.0, si_log_residual(1e4), 1e-3))
    for k in range(5):
        for l in range(5):
            out.append(Check(f"prop41_k{k}_l{l}", cf.J_moment(k, l),
                             mixed_moment_J(k, l, 1e-8).value, 1e-6))
    for n in range(1, 5):
        out.append(Check(f"cor42_n{n}", cf.L1_cheb(n), integrate_L1(0.0, n, 1e-8).value, 1e-6))
        out.append(Check(f"lem43_n{n}", cf.L2_cheb(n), integrate_L2(0.0, n, 1e-8).value, 1e-6))
    for lam in (-0.25, 0.5, 1.0, 2.5):
        for n in (0, 3, 7):
            out.append(Check(f"thm61_lam{lam:g}_n{n}", cf.L3_exact(lam, n),
                             integrate_L3(lam, n, 1e-9).value, 1e-7))
    for lam in (0.3, 1.0, 2.0):
        for n in (1, 5, 20):
            step = cf.L3_exact(lam, n) - cf.L3_exact(lam, n - 1)
            out.append(Check(f"lem64_telescope_lam{lam:g}_n{n}",
                             -2.0 * cf.gegenbauer_log_moment(lam, n), step, 1e-10))
    for lam in (0.5, 1.0, 2.0):
        for k in (0, 2, 4):
            out.append(Check(f"lem63_derivative_lam{lam:g}_k{k}",
                             cf.gegenbauer_log_moment(lam, k), power_moment_log_derivative(lam, k),
                             1e-5))
    return out


def kernel_checks():
    out = []
    for lam in (-0.25, 0.0, 0.5, 1.5):
        for n in (0, 3, 10):
            rule = gauss_rule(lam, n + 2)
            ctx = KernelContext.build(lam, n)
            trace = math.fsum(rule.weights * kernel_diagonal(ctx, rule.nodes))
            out.append(Check(f"trace_lam{lam:g}_n{n}", n + 1.0, trace, 1e-10))
            x = np.array([-0.83, -0.2, 0.41, 0.97])
            z = np.array([0.5, -0.66, 0.05, -0.9])
            kxy = kernel(ctx, rule.nodes[None, :], x[:, None])
            kyz = kernel(ctx, rule.nodes[None, :], z[:, None])
            reproduced = np.sum(rule.weights * kxy * kyz, axis=1)
            direct = kernel(ctx, x, z)
            out.append(Check(f"reproducing_lam{lam:g}_n{n}", 0.0,
                             float(np.max(np.abs(reproduced - direct))), 1e-10))
            out.append(Check(f"symmetry_lam{lam:g}_n{n}", 0.0,
                             float(np.max(np.abs(kernel(ctx, x, z) - kernel(ctx, z, x)))), 0.0))
    for n in (2, 3, 4, 10, 30):
        value = log_energy(fekete_points(n))
        exact = epsilon_exact(n)
        out.append(Check(f"thm11_n{n}", exact, value, 1e-8 * max(1.0, abs(exact))))
    for m in (1, 2, 5, 12):
        zeros = jacobi11_zeros(m)
        i, j = np.triu_indices(m, k=1)
        vandermonde = 2.0 * math.fsum(np.log(np.abs(zeros[i] - zeros[j])))
        observed = (2 * m - 2) * leading_coefficient_log(m) + vandermonde
        out.append(Check(f"discriminant_m{m}", discriminant_log(m), observed,
                         1e-9 * max(1.0, abs(discriminant_log(m)))))
    return out


SUITES = {"lemmas": lemma_checks, "kernels": kernel_checks}


def run_suite(name: str):
    if name == "all":
        return lemma_checks() + kernel_checks()
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name]()
