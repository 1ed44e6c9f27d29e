"""Fekete points of [-1, 1] and the minimal logarithmic energy.

The n Fekete points are -1, +1 and the n - 2 zeros of P_{n-2}^(1,1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .orthopoly import jacobi11, orthonormal_offdiag
from .specfun import LOG2, j_log_j_terms
from .tridiag import eigvalsh_tridiagonal

DUPLICATE_THRESHOLD = 1e-15
_NEWTON_STEP = 1e-7


class Provenance(str, enum.Enum):
    FEKETE = "fekete"
    DPP_SAMPLE = "dpp_sample"
    MANUAL = "manual"


class DuplicatePointError(ValueError):
    pass


@dataclass(frozen=True)
class PointConfiguration:
    points: tuple
    provenance: Provenance = Provenance.MANUAL

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if any(not -1.0 <= p <= 1.0 for p in pts):
            raise ValueError("points must lie in [-1, 1]")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("points must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    @classmethod
    def from_unsorted(cls, points, provenance=Provenance.MANUAL):
        return cls(tuple(sorted(float(p) for p in points)), provenance)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points)

    def __len__(self):
        return len(self.points)


def jacobi11_zeros(m: int) -> np.ndarray:
    """Zeros of P_m^(1,1) in ascending order.

    Golub-Welsch eigenvalues of the Jacobi matrix of the weight (1 - x^2)
    (Gegenbauer index 3/2), then one Newton step with a centred-difference
    derivative.
    """
    if m < 1:
        return np.empty(0)
    off = orthonormal_offdiag(1.5, m - 1)
    x = eigvalsh_tridiagonal(np.zeros(m), off)
    h = _NEWTON_STEP
    deriv = (jacobi11(m, x + h) - jacobi11(m, x - h)) / (2.0 * h)
    step = jacobi11(m, x) / deriv
    polished = x - step
    # the polish must not move a zero out of its bisection bracket
    x = np.where(np.abs(step) < 1e-10, polished, x)
    # exact symmetry of the zero set
    x = 0.5 * (x - x[::-1])
    return x


def fekete_points(n: int) -> PointConfiguration:
    n = int(n)
    if n < 2:
        raise ValueError("Fekete configurations need n >= 2")
    interior = jacobi11_zeros(n - 2)
    pts = np.concatenate(([-1.0], interior, [1.0]))
    return PointConfiguration(tuple(pts), Provenance.FEKETE)


def log_energy(cfg) -> float:
    """-sum_{i != j} log|x_i - x_j| (each unordered pair counted twice)."""
    pts = np.asarray(cfg.points if isinstance(cfg, PointConfiguration) else cfg, dtype=float)
    if pts.size < 2:
        raise ValueError("energy needs at least two points")
    i, j = np.triu_indices(pts.size, k=1)
    d = np.abs(pts[i] - pts[j])
    if np.any(d < DUPLICATE_THRESHOLD):
        raise DuplicatePointError("configuration has coincident points")
    return -2.0 * math.fsum(np.log(d))


def epsilon_exact(n: int) -> float:
    """Minimal logarithmic energy of n points in [-1, 1]."""
    n = int(n)
    if n < 2:
        raise ValueError("epsilon_exact needs n >= 2")
    terms = [-n * (n - 1) * LOG2, -n * math.log(n)]
    if n > 2:
        terms.append(-3.0 * (n - 1) * math.log(n - 1))
        terms.extend(-4.0 * j_log_j_terms(n - 2))
    terms.extend(j_log_j_terms(2 * n - 2))
    return math.fsum(terms)


def epsilon_asymptotic(n: int) -> float:
    n = int(n)
    if n < 2:
        raise ValueError("epsilon_asymptotic needs n >= 2")
    ln = math.log(n)
    return LOG2 * n * n - n * ln - 2.0 * LOG2 * n - 0.25 * ln


def leading_coefficient_log(m: int) -> float:
    """log of kappa = 2^-m binom(2m + 2, m), leading coefficient of P_m^(1,1)."""
    return (math.lgamma(2 * m + 3.0) - math.lgamma(m + 1.0) - math.lgamma(m + 3.0)
            - m * LOG2)


def discriminant_log(m: int) -> float:
    """log of the discriminant of P_m^(1,1) from its closed product form."""
    m = int(m)
    if m < 1:
        raise ValueError("discriminant_log needs m >= 1")
    n = m + 2
    terms = [-m * (m - 1) * LOG2]
    for j in range(1, m + 1):
        terms.append((j - 2 * n + 6) * math.log(j))
        terms.append(2 * (j - 1) * math.log(j + 1))
        terms.append((n - 2 - j) * math.log(n + j))
    return math.fsum(terms)


def energy_report(n_list):
    """Rows comparing the direct Fekete energy with the exact and
    asymptotic formulas."""
    from .report import EnergyRow, timed

    rows = []
    for n in n_list:
        n = int(n)
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        value, ms = timed(lambda: log_energy(fekete_points(n)))
        rows.append(EnergyRow("fekete", "energy", None, n, value, None, ms))
        value, ms = timed(lambda: epsilon_exact(n))
        rows.append(EnergyRow("epsilon_exact", "energy", None, n, value, None, ms))
        value, ms = timed(lambda: epsilon_asymptotic(n))
        rows.append(EnergyRow("epsilon_asym", "energy", None, n, value, None, ms))
    return rows


__all__ = [
    "Provenance", "PointConfiguration", "DuplicatePointError", "jacobi11_zeros",
    "fekete_points", "log_energy", "epsilon_exact", "epsilon_asymptotic",
    "leading_coefficient_log", "discriminant_log", "energy_report",
]
