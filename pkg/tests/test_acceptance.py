"""Acceptance criteria.  Each test prints one PASS/FAIL line, and the
summary is repeated at the end of the pytest run."""

import math
import time

import numpy as np
import pytest

from logdpp import closedform as cf
from logdpp import dpp
from logdpp.checks import cos_log_quadrature, harmonic_block_direct, log_sine_integral, \
    si_log_residual
from logdpp.fekete import epsilon_asymptotic, epsilon_exact, fekete_points, log_energy
from logdpp.orthopoly import KernelContext
from logdpp.quadrature import (expected_energy_numeric, integrate_L1, integrate_L2, integrate_L3,
                               mixed_moment_J)
from logdpp.specfun import EULER_GAMMA, harmonic

LOG2 = math.log(2)


def test_fekete_energy_equals_closed_form(report_criterion):
    start = time.perf_counter()
    worst = 0.0
    for n in range(2, 61):
        eps = epsilon_exact(n)
        worst = max(worst, abs(log_energy(fekete_points(n)) - eps) / max(1.0, abs(eps)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5
    report_criterion(1, ok, f"Fekete energy vs exact minimum, n=2..60: worst rel err "
                            f"{worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_minimum_energy_asymptotic_tail(report_criterion):
    start = time.perf_counter()
    tails = [epsilon_exact(n) - epsilon_asymptotic(n) for n in (10 ** 2, 10 ** 3, 10 ** 4)]
    elapsed = time.perf_counter() - start
    steps = [abs(b - a) for a, b in zip(tails, tails[1:])]
    ok = max(steps) < 0.05 and elapsed < 1
    report_criterion(2, ok, f"O(1) tail of the minimum energy, decade changes "
                            f"{steps[0]:.4f}, {steps[1]:.4f}, {elapsed:.3f}s")
    assert ok


def test_chebyshev_integrals_against_closed_forms(report_criterion):
    start = time.perf_counter()
    worst_l, worst_e = 0.0, 0.0
    for n in range(1, 9):
        l1 = integrate_L1(0.0, n).value
        l2 = integrate_L2(0.0, n).value
        worst_l = max(worst_l, abs(l1 - cf.L1_cheb(n)), abs(l2 - cf.L2_cheb(n)))
        worst_e = max(worst_e, abs(expected_energy_numeric(0.0, n) - cf.E0_exact(n + 1)))
    elapsed = time.perf_counter() - start
    ok = worst_l <= 1e-5 and worst_e <= 2e-5 and elapsed < 60
    report_criterion(3, ok, f"lam=0 quadrature vs closed forms, n=1..8: L1/L2 err "
                            f"{worst_l:.1e}, energy err {worst_e:.1e}, {elapsed:.1f}s")
    assert ok


def test_universality_remainder_shrinks(report_criterion):
    start = time.perf_counter()
    ok = True
    parts = []
    for lam in (0.5, 1.5):
        ratios = []
        for n in (10, 20, 40):
            lead = (n + 1) ** 2 * LOG2 - (n + 1) * math.log(n + 1) + (1 - EULER_GAMMA - 2 * LOG2) * n
            ratios.append(abs(expected_energy_numeric(lam, n, 1e-4) - lead) / n)
        ok &= ratios[0] > ratios[1] > ratios[2]
        parts.append(f"lam={lam}: " + ", ".join(f"{r:.4f}" for r in ratios))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    report_criterion(4, ok, f"|r(n)|/n decreasing over n=10,20,40 ({'; '.join(parts)}), "
                            f"{elapsed:.1f}s")
    assert ok


def test_endpoint_integral_closed_form(report_criterion):
    start = time.perf_counter()
    worst = 0.0
    for lam in (-0.25, 0.5, 1.0, 2.5):
        for n in range(11):
            worst = max(worst, abs(cf.L3_exact(lam, n) - integrate_L3(lam, n, 1e-9).value))
    zero_branch = all(cf.L3_exact(0.0, n) == 2 * (n + 1) * LOG2 + harmonic(n) for n in range(11))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and zero_branch and elapsed < 30
    report_criterion(5, ok, f"L3 closed form vs quadrature: worst err {worst:.1e}, lam=0 "
                            f"branch exact: {zero_branch}, {elapsed:.2f}s")
    assert ok


def test_chebyshev_mixed_moments(report_criterion):
    worst = 0.0
    for k in range(5):
        for l in range(5):
            expected = 1 / (4 * k) if (k == l and k >= 1) else 0.0
            worst = max(worst, abs(mixed_moment_J(k, l, 1e-8).value - expected),
                        abs(cf.J_moment(k, l) - expected))
    ok = worst <= 1e-6
    report_criterion(6, ok, f"2-D quadrature of the Chebyshev mixed moments, k,l<=4: worst "
                            f"err {worst:.1e}")
    assert ok


def test_appendix_identities(report_criterion):
    worst_cos = 0.0
    for k in range(1, 9):
        for l in range(0, k + 1):
            if l == 0:
                target = 1 / k
            elif l == k:
                target = 1 / (4 * k)
            else:
                target = 0.5 * (1 / (k - l) + 1 / (k + l))
            worst_cos = max(worst_cos, abs(cos_log_quadrature(k, l) - target),
                            abs(cf.cos_log_integral(k, l) - target))
    worst_h = max(abs(cf.harmonic_block_sum(n) - harmonic_block_direct(n))
                  for n in (2, 3, 10, 100, 1000, 10_000))
    log_sine = abs(log_sine_integral())
    si_resid = abs(si_log_residual(1e4))
    ok = worst_cos <= 1e-7 and worst_h <= 1e-9 and log_sine <= 1e-8 and si_resid <= 1e-3
    report_criterion(7, ok, f"cos-log integrals err {worst_cos:.1e}; harmonic block sums err "
                            f"{worst_h:.1e}; log-sine integral {log_sine:.1e}; sine-integral "
                            f"residual at 1e4 {si_resid:.1e}")
    assert ok


def test_sampler_statistics(report_criterion):
    start = time.perf_counter()
    cases = [(0.0, 1, cf.E0_exact(2)), (0.0, 3, cf.E0_exact(4)),
             (1.0, 3, expected_energy_numeric(1.0, 3, 1e-8))]
    zs = []
    for lam, n, ref in cases:
        est = dpp.mc_expected_energy(KernelContext.build(lam, n), 100_000, seed=20240601 + n)
        zs.append((est.mean - ref) / est.std_error)
    hist = dpp.intensity_histogram(KernelContext.build(0.0, 4), 100_000, 20, seed=7)
    elapsed = time.perf_counter() - start
    ok = all(abs(z) < 4 for z in zs) and hist.p_value > 1e-3 and elapsed < 300
    report_criterion(8, ok, "Monte Carlo z-scores " + ", ".join(f"{z:+.2f}" for z in zs)
                     + f"; intensity chi-square p={hist.p_value:.3f}, {elapsed:.1f}s")
    assert ok


def test_endpoint_augmented_process_has_higher_energy(report_criterion):
    ns = np.arange(5, 41)
    pairs = np.array([cf.corollary_comparison(0.0, int(n)) for n in ns])
    gap = pairs[:, 1] - pairs[:, 0]
    design = np.column_stack((np.ones(ns.size), np.log(ns)))
    coef, *_ = np.linalg.lstsq(design, gap, rcond=None)
    fitted = design @ coef
    r2 = 1 - np.sum((gap - fitted) ** 2) / np.sum((gap - gap.mean()) ** 2)
    ok = bool(np.all(gap > 0)) and coef[1] > 0 and r2 > 0.99
    report_criterion(9, ok, f"(n+3)-point DPP below (n+1)-point DPP plus endpoints for "
                            f"n=5..40; gap ~ {coef[0]:.3f} + {coef[1]:.3f} log n, R^2={r2:.5f}")
    assert ok


def test_excess_energy_constant(report_criterion):
    start = time.perf_counter()
    n = 100
    eps = epsilon_exact(n + 1)
    excess = {lam: (expected_energy_numeric(lam, n, 1e-4) - eps) / n for lam in (0.0, 0.5, 1.0)}
    elapsed = time.perf_counter() - start
    ok = all(0.32 <= e <= 0.53 for e in excess.values()) and elapsed < 600
    report_criterion(10, ok, "excess per point at n=100: "
                     + ", ".join(f"lam={lam}: {e:.4f}" for lam, e in excess.items())
                     + f" (1-gamma={1 - EULER_GAMMA:.4f}), {elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
