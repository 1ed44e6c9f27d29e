"""Scalar special functions: log-gamma, digamma, harmonic numbers,
partial sums of j*log(j) and the sine integral.

Everything here is pure and reentrant.  The sine integral also accepts
numpy arrays, because the appendix checks integrate it on dense grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286061
LOG2 = math.log(2.0)

# Bernoulli terms B_{2k}/(2k) of the digamma asymptotic series.
_PSI_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_PSI_SWITCH = 10.0
_SI_SWITCH = 16.0
_HARMONIC_DIRECT_MAX = 256


class PoleError(ValueError):
    """Raised when a function is evaluated at one of its poles."""


@dataclass(frozen=True)
class SpecialValue:
    value: float
    abs_error_bound: float = 0.0

    def __post_init__(self):
        if not self.abs_error_bound >= 0:
            raise ValueError("abs_error_bound must be non-negative")


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def log_abs_gamma(x: float) -> tuple[float, int]:
    """Return (log|Gamma(x)|, sign Gamma(x)) for any non-pole real x."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x > 0:
        return math.lgamma(x), 1
    # Gamma(x) < 0 exactly when floor(x) is odd.
    sign = -1 if int(math.floor(x)) % 2 else 1
    return math.lgamma(x), sign


def log_pochhammer(a: float, k: int) -> tuple[float, int]:
    """(log|(a)_k|, sign) with (a)_k = a (a+1) ... (a+k-1).

    Returns (-inf, 0) when the product vanishes.
    """
    log_abs = 0.0
    sign = 1
    for i in range(k):
        f = a + i
        if f == 0:
            return -math.inf, 0
        if f < 0:
            sign = -sign
        log_abs += math.log(abs(f))
    return log_abs, sign


def digamma(x: float) -> float:
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"digamma has a pole at {x}")
    if x < 0:
        # reflection: psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    shift = 0.0
    while x < _PSI_SWITCH:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for coeff in _PSI_ASYMPTOTIC:
        series += coeff * power
        power *= inv2
    return shift + math.log(x) - 0.5 / x - series


def harmonic(n: int) -> float:
    """H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0."""
    n = int(n)
    if n < 0:
        raise ValueError("harmonic needs n >= 0")
    if n <= _HARMONIC_DIRECT_MAX:
        return math.fsum(1.0 / k for k in range(1, n + 1))
    return digamma(n + 1.0) + EULER_GAMMA


def sum_j_log_j(n: int) -> float:
    """Exact partial sum sum_{j=1}^n j log j (compensated)."""
    n = int(n)
    if n < 1:
        raise ValueError("sum_j_log_j needs n >= 1")
    return math.fsum(j_log_j_terms(n))


def j_log_j_terms(n: int) -> np.ndarray:
    j = np.arange(1, n + 1, dtype=float)
    return j * np.log(j)


def sum_j_log_j_asymptotic(n: int) -> float:
    """n^2 log n / 2 - n^2 / 4 + n log n / 2 + log n / 12 (no O(1) term)."""
    n = float(n)
    ln = math.log(n)
    return 0.5 * n * n * ln - 0.25 * n * n + 0.5 * n * ln + ln / 12.0


def _si_series(x):
    x = np.asarray(x, dtype=float)
    x2 = x * x
    term = x.copy()  # (-1)^k x^(2k+1) / (2k+1)!
    total = x.copy()
    for k in range(1, 60):
        term = -term * x2 / ((2 * k) * (2 * k + 1))
        total = total + term / (2 * k + 1)
        if np.all(np.abs(term) < 1e-18 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _si_continued_fraction(x):
    # Modified Lentz evaluation of E1(ix); Si(x) = pi/2 + Im(exp(-ix) h).
    x = np.asarray(x, dtype=float)
    tiny = 1e-300
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for i in range(2, 200):
        a = -float((i - 1) ** 2)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    h = (np.cos(x) - 1j * np.sin(x)) * h
    return 0.5 * math.pi + h.imag


def sine_integral(x):
    """Si(x) = int_0^x sin(t)/t dt for x >= 0.

    Power series below x = 16, continued fraction for the auxiliary
    functions above.  Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("sine_integral needs x >= 0")
    out = np.empty_like(arr)
    small = arr < _SI_SWITCH
    if np.any(small):
        out[small] = _si_series(arr[small])
    if np.any(~small):
        out[~small] = _si_continued_fraction(arr[~small])
    if out.ndim == 0:
        return float(out)
    return out
