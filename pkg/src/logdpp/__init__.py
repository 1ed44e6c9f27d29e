"""Logarithmic energy of Fekete points and of Gegenbauer determinantal
point processes on [-1, 1]."""

from .closedform import (ClosedFormValue, E0_exact, FormulaId, J_moment, L1_cheb, L2_cheb,
                         L3_exact, corollary_comparison, cos_log_integral,
                         gegenbauer_log_moment, harmonic_block_sum, jacobi_power_moment)
from .dpp import McEstimate, SamplerState, intensity_histogram, mc_expected_energy, sample
from .fekete import (PointConfiguration, Provenance, discriminant_log, epsilon_asymptotic,
                     epsilon_exact, fekete_points, jacobi11_zeros, leading_coefficient_log,
                     log_energy)
from .orthopoly import (GegenbauerParam, KernelContext, gegenbauer, gegenbauer_normalized,
                        kernel, kernel_diagonal, weight)
from .quadrature import (expected_energy_numeric, gauss_rule, integrate_L1, integrate_L2,
                         integrate_L3)
from .specfun import digamma, harmonic, log_gamma, sine_integral, sum_j_log_j

__version__ = "0.1.0"
