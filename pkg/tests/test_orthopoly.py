import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from logdpp.orthopoly import (GegenbauerParam, KernelContext, gegenbauer, gegenbauer_normalized,
                              jacobi11, kernel, kernel_diagonal, log_norm_constant,
                              orthonormal_table, weight, weight_theta)
from logdpp.quadrature import gauss_rule

lams = st.sampled_from([-0.45, -0.25, 0.0, 0.3, 0.5, 1.0, 1.5, 2.5])


def test_param_validation():
    assert GegenbauerParam(0).is_chebyshev
    assert not GegenbauerParam(0.5).is_chebyshev
    with pytest.raises(ValueError):
        GegenbauerParam(-0.5)


@pytest.mark.parametrize("lam", [-0.4, 0.25, 0.5, 1.0, 3.0])
def test_gegenbauer_matches_scipy(lam):
    x = np.linspace(-1, 1, 41)
    for k in range(9):
        np.testing.assert_allclose(gegenbauer(lam, k, x), special.eval_gegenbauer(k, lam, x),
                                   rtol=1e-12, atol=1e-12)


def test_chebyshev_branch():
    x = np.linspace(-1.5, 1.5, 31)
    for k in range(8):
        np.testing.assert_allclose(gegenbauer(0.0, k, x), special.eval_chebyt(k, x),
                                   rtol=1e-13, atol=1e-13)


def test_jacobi11_matches_scipy():
    x = np.linspace(-1, 1, 25)
    for m in range(10):
        np.testing.assert_allclose(jacobi11(m, x), special.eval_jacobi(m, 1, 1, x),
                                   rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("lam", [-0.3, 0.0, 0.5, 2.0])
def test_weight_is_probability_density(lam):
    total, _ = integrate.quad(lambda x: weight(lam, x), -1, 1, points=[0.0], limit=200)
    assert total == pytest.approx(1.0, abs=1e-7)


def test_weight_theta_agrees_with_weight():
    t = np.linspace(0.1, 3.0, 20)
    np.testing.assert_allclose(weight_theta(0.7, t), weight(0.7, np.cos(t)) * np.sin(t),
                               rtol=1e-13)


def test_weight_domain():
    with pytest.raises(ValueError):
        weight(0.0, 1.0)
    with pytest.raises(ValueError):
        weight(1.0, 1.2)
    assert weight(1.0, 1.0) == 0.0


@settings(max_examples=25, deadline=None)
@given(lams, st.integers(min_value=0, max_value=12))
def test_orthonormality_under_gauss_rule(lam, n):
    rule = gauss_rule(lam, n + 2)
    p = orthonormal_table(lam, n, rule.nodes)
    gram = (p * rule.weights) @ p.T
    np.testing.assert_allclose(gram, np.eye(n + 1), atol=1e-11)


@pytest.mark.parametrize("lam", [-0.25, 0.0, 0.5, 1.7])
def test_normalized_gegenbauer_matches_orthonormal_recurrence(lam):
    ctx = KernelContext.build(lam, 7)
    x = np.linspace(-0.99, 0.99, 15)
    table = orthonormal_table(lam, 7, x)
    for k in range(8):
        # sign of the leading coefficient of C_k^lam
        sign = -1.0 if (lam < 0 and k >= 1) else 1.0
        np.testing.assert_allclose(gegenbauer_normalized(ctx, k, x), sign * table[k],
                                   rtol=1e-11, atol=1e-12)
    with pytest.raises(IndexError):
        gegenbauer_normalized(ctx, 8, 0.0)


def test_log_norm_constant_chebyshev_and_index_zero():
    assert log_norm_constant(0.0, 3) == pytest.approx(0.5 * math.log(2))
    assert log_norm_constant(-0.3, 0) == 0.0


@settings(max_examples=30, deadline=None)
@given(lams, st.integers(min_value=0, max_value=25),
       st.floats(min_value=-1, max_value=1), st.floats(min_value=-1, max_value=1))
def test_kernel_symmetry_and_agreement(lam, n, x, y):
    ctx = KernelContext.build(lam, n)
    kxy = kernel(ctx, x, y)
    assert kxy == kernel(ctx, y, x)
    direct = float(np.sum(orthonormal_table(lam, n, x) * orthonormal_table(lam, n, y)))
    scale = max(1.0, abs(direct), math.sqrt(kernel_diagonal(ctx, x) * kernel_diagonal(ctx, y)))
    assert kxy == pytest.approx(direct, abs=1e-11 * scale)


def test_kernel_near_diagonal_continuity():
    ctx = KernelContext.build(1.5, 20)
    x = 0.3
    for gap in (0.0, 1e-12, 1e-6, 0.99 * ctx.cd_switch_threshold, 1.01 * ctx.cd_switch_threshold):
        direct = float(np.sum(orthonormal_table(1.5, 20, x) * orthonormal_table(1.5, 20, x + gap)))
        assert kernel(ctx, x, x + gap) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("lam,n", [(0.0, 4), (0.5, 6), (-0.25, 3), (2.0, 9)])
def test_kernel_trace_and_reproducing_property(lam, n):
    ctx = KernelContext.build(lam, n)
    rule = gauss_rule(lam, n + 2)
    assert math.fsum(rule.weights * kernel_diagonal(ctx, rule.nodes)) == pytest.approx(n + 1)
    x, z = 0.37, -0.81
    reproduced = np.sum(rule.weights * kernel(ctx, x, rule.nodes) * kernel(ctx, rule.nodes, z))
    assert reproduced == pytest.approx(kernel(ctx, x, z), abs=1e-11)


def test_chebyshev_kernel_diagonal_closed_form():
    # 1 + 2 sum cos^2(k t)
    ctx = KernelContext.build(0.0, 5)
    t = np.linspace(0.05, 3.1, 11)
    expected = 1 + 2 * sum(np.cos(k * t) ** 2 for k in range(1, 6))
    np.testing.assert_allclose(kernel_diagonal(ctx, np.cos(t)), expected, rtol=1e-13)


def test_context_rejects_negative_degree():
    with pytest.raises(ValueError):
        KernelContext.build(0.5, -1)
