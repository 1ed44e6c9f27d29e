import math

import numpy as np
import pytest
from scipy import stats

from logdpp import dpp
from logdpp.closedform import E0_exact
from logdpp.fekete import PointConfiguration, Provenance
from logdpp.orthopoly import KernelContext
from logdpp.quadrature import expected_energy_numeric


def test_single_point_follows_arcsine_law():
    pts = dpp.sample_many(KernelContext.build(0.0, 0), 100_000, seed=11)[:, 0]
    arcsine_cdf = lambda x: 0.5 + np.arcsin(x) / np.pi
    ks = stats.kstest(pts, arcsine_cdf).statistic
    assert ks < 1.36 / math.sqrt(100_000) * 1.5


def test_single_point_uniform_for_half_index():
    pts = dpp.sample_many(KernelContext.build(0.5, 0), 50_000, seed=2)[:, 0]
    assert stats.kstest(pts, stats.uniform(-1, 2).cdf).pvalue > 1e-3


def _min_point_cdf(m):
    # lam = 0, n = 1: P(min > m) = M00 M11 - M01^2 with M_jk = int_m^1 p_j p_k w
    tm = np.arccos(m)
    m00 = tm / np.pi
    m01 = math.sqrt(2) * np.sin(tm) / np.pi
    m11 = (tm + np.sin(tm) * np.cos(tm)) / np.pi
    return 1 - (m00 * m11 - m01 * m01)


def test_minimum_of_pair_matches_two_point_density():
    pts = dpp.sample_many(KernelContext.build(0.0, 1), 100_000, seed=3)
    assert stats.kstest(pts[:, 0], _min_point_cdf).pvalue > 1e-3


def test_pair_repels_in_angle():
    pts = dpp.sample_many(KernelContext.build(0.0, 1), 100_000, seed=4)
    theta = np.arccos(pts)
    close = np.mean(np.abs(theta[:, 0] - theta[:, 1]) < 0.1)
    rng = np.random.default_rng(4)
    indep = np.arccos(np.cos(np.pi * rng.random((100_000, 2))))
    baseline = np.mean(np.abs(indep[:, 0] - indep[:, 1]) < 0.1)
    assert close < baseline


@pytest.mark.parametrize("lam,n", [(0.0, 4), (-0.45, 6), (1.5, 10), (3.0, 5)])
def test_samples_are_distinct_interior_points(lam, n):
    ctx = KernelContext.build(lam, n)
    for seed in range(20):
        cfg = dpp.sample(ctx, seed)
        assert isinstance(cfg, PointConfiguration) and cfg.provenance is Provenance.DPP_SAMPLE
        pts = cfg.as_array()
        assert len(cfg) == n + 1
        assert np.all(np.diff(pts) > 0)
        if lam >= -0.25:
            assert np.all(np.abs(pts) < 1)
        else:
            # (1 - x^2)^(-0.95) puts real mass within rounding distance of the ends
            assert np.all(np.abs(pts) <= 1)


def test_sampling_is_repeatable():
    ctx = KernelContext.build(0.8, 6)
    assert dpp.sample(ctx, 123).points == dpp.sample(ctx, 123).points
    assert dpp.sample(ctx, 123).points != dpp.sample(ctx, 124).points
    a = dpp.mc_expected_energy(ctx, 3000, seed=9, block_size=500, workers=1)
    b = dpp.mc_expected_energy(ctx, 3000, seed=9, block_size=500, workers=3)
    assert a == b


@pytest.mark.parametrize("lam,n", [(0.0, 4), (-0.3, 3), (1.5, 8)])
def test_conditional_densities_integrate_to_one(lam, n):
    ctx = KernelContext.build(lam, n)
    pts = dpp.sample(ctx, 5).points
    for t in range(n + 1):
        state = dpp.SamplerState.from_points(ctx, pts[:t])
        assert state.conditional_mass() == pytest.approx(1.0, abs=1e-6)


def test_conditional_density_vanishes_at_selected_points():
    ctx = KernelContext.build(0.5, 4)
    state = dpp.SamplerState.from_points(ctx, [0.2, -0.6])
    assert state.remaining == 3
    assert state.conditional_density(np.array([0.2, -0.6])) == pytest.approx([0, 0], abs=1e-10)
    assert state.conditional_density(0.7) > 0
    full = dpp.SamplerState.from_points(ctx, dpp.sample(ctx, 1).points)
    with pytest.raises(ValueError):
        full.conditional_density(0.0)
    with pytest.raises(ValueError):
        full.add_point(0.1)


def test_clamp_rule():
    assert np.all(dpp._clamp_density(np.array([-5e-13, 0.0, 1.0])) >= 0)
    with pytest.raises(dpp.NegativeDensityError):
        dpp._clamp_density(np.array([-1e-9]))


def test_mc_estimate_validation():
    with pytest.raises(ValueError):
        dpp.McEstimate(0.0, -1.0, 10)
    with pytest.raises(ValueError):
        dpp.McEstimate(0.0, 1.0, 0)
    with pytest.raises(ValueError):
        dpp.mc_expected_energy(KernelContext.build(0.0, 1), 1, seed=0)


def test_two_point_energy_mean():
    est = dpp.mc_expected_energy(KernelContext.build(0.0, 1), 100_000, seed=42)
    assert abs(est.mean - E0_exact(2)) < 4 * est.std_error


def test_std_error_scales_with_sample_count():
    ctx = KernelContext.build(0.0, 2)
    small = dpp.mc_expected_energy(ctx, 20_000, seed=1)
    large = dpp.mc_expected_energy(ctx, 40_000, seed=2)
    assert large.std_error / small.std_error == pytest.approx(1 / math.sqrt(2), rel=0.1)


@pytest.mark.slow
def test_high_index_energy_against_quadrature():
    ctx = KernelContext.build(2.0, 6)
    est = dpp.mc_expected_energy(ctx, 30_000, seed=8)
    assert abs(est.mean - expected_energy_numeric(2.0, 6, 1e-7)) < 4 * est.std_error


def test_histogram_theoretical_column():
    h0 = dpp.intensity_histogram(KernelContext.build(0.5, 0), 2000, 10, seed=0)
    theory = [row[3] for row in h0.rows]
    np.testing.assert_allclose(theory, 0.1, atol=1e-12)
    h4 = dpp.intensity_histogram(KernelContext.build(0.0, 4), 2000, 16, seed=0)
    assert sum(row[3] for row in h4.rows) == pytest.approx(5.0, abs=1e-9)
    assert sum(row[2] for row in h4.rows) == pytest.approx(5.0, abs=1e-12)
    with pytest.raises(ValueError):
        dpp.intensity_histogram(KernelContext.build(0.0, 4), 100, 5, seed=0)


def test_histogram_goodness_of_fit():
    h = dpp.intensity_histogram(KernelContext.build(0.0, 4), 100_000, 20, seed=3)
    assert h.p_value > 1e-3


def test_intensity_mass_negative_index():
    ctx = KernelContext.build(-0.4, 3)
    assert float(dpp.intensity_mass(ctx, -1.0, 1.0)[0]) == pytest.approx(4.0, abs=1e-8)
