"""Closed-form expressions for the Chebyshev-case energy integrals, the
endpoint integral L3 at any lam, and the moment and summation identities
they are built from.

Domains are enforced strictly; nothing is silently extended past the
range where the formula was derived.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .specfun import LOG2, digamma, harmonic, log_abs_gamma


class FormulaId(str, enum.Enum):
    THM12_EXACT = "thm12_exact"
    COR42 = "cor42"
    LEM43 = "lem43"
    THM61 = "thm61"
    LEM63 = "lem63"
    LEM64 = "lem64"
    PROP41 = "prop41"
    LEMA4 = "lemA4"
    LEMA5 = "lemA5"


@dataclass(frozen=True)
class ClosedFormValue:
    value: float
    formula_id: FormulaId

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.formula_id} evaluated to {self.value}")


def _check_lam(lam, allow_zero=True):
    lam = float(lam)
    if not lam > -0.5:
        raise ValueError(f"lam must exceed -1/2, got {lam}")
    if lam == 0.0 and not allow_zero:
        raise ValueError("lam = 0 is not covered by this formula")
    return lam


def E0_exact(npts: int) -> float:
    """Expected log-energy of the npts-point Chebyshev DPP (npts >= 2)."""
    npts = int(npts)
    if npts < 2:
        raise ValueError("E0_exact needs npts >= 2")
    n = npts - 1
    bracket = (npts * LOG2 + 0.75 * harmonic(n) + n * harmonic(2 * n - 1)
               + 0.5 * harmonic(2 * n) - n + 0.5)
    return npts * npts * LOG2 - bracket


def E0_asymptotic(npts: int) -> float:
    """Leading terms of E0_exact without the O(1) remainder."""
    n = int(npts) - 1
    return (npts * npts * LOG2 - npts * math.log(npts)
            + (1.0 - 0.57721566490153286061 - 2.0 * LOG2) * n - 0.25 * math.log(n))


def L1_cheb(n: int) -> float:
    n = int(n)
    if n < 0:
        raise ValueError("L1_cheb needs n >= 0")
    return (n + 1) ** 2 * LOG2 + 0.25 * harmonic(n)


def L2_cheb(n: int) -> float:
    n = int(n)
    if n < 1:
        raise ValueError("L2_cheb needs n >= 1")
    return ((n + 1) * LOG2 + harmonic(n) + n * harmonic(2 * n - 1) + 0.5 * harmonic(2 * n)
            - n + 0.5)


def L3_exact(lam, n: int) -> float:
    """int K_n(x,x) w(x) log 1/(1 - x^2) dx in closed form."""
    lam = _check_lam(lam)
    n = int(n)
    if n < 0:
        raise ValueError("L3_exact needs n >= 0")
    if lam == 0.0:
        return 2.0 * (n + 1) * LOG2 + harmonic(n)
    p = digamma(lam + 0.5)
    return ((n + 1) * (digamma(n + lam + 1.0) - p)
            - (n + 2.0 * lam) * (digamma(n + lam + 0.5) - p
                                 - 2.0 * digamma(2.0 * n + 2.0 * lam + 1.0)
                                 + 2.0 * digamma(n + 2.0 * lam + 1.0)))


def gegenbauer_log_moment(lam, k: int) -> float:
    """int C_hat_k(x)^2 w(x) log(1 - x) dx for lam != 0."""
    lam = _check_lam(lam, allow_zero=False)
    k = int(k)
    if k < 0:
        raise ValueError("k must be non-negative")
    return (-2.0 * digamma(2.0 * lam + 2.0 * k) + digamma(2.0 * lam + k) + LOG2
            + digamma(lam + k + 0.5) - 1.0 / (2.0 * k + 2.0 * lam))


def gegenbauer_norm_integral(lam, k: int) -> float:
    """int C_k^lam(x)^2 (1 - x^2)^(lam - 1/2) dx (the s = 0 value)."""
    lam = _check_lam(lam, allow_zero=False)
    lg, sg = log_abs_gamma(2.0 * lam + k)
    ll, _ = log_abs_gamma(lam)
    val = (math.log(math.pi) + (1.0 - 2.0 * lam) * LOG2 + lg - math.lgamma(k + 1.0)
           - math.log(abs(k + lam)) - 2.0 * ll)
    # k = 0 with lam < 0: Gamma(2 lam) and lam are both negative
    return sg * (1 if k + lam > 0 else -1) * math.exp(val)


def jacobi_power_moment(lam, k: int, s: float) -> float:
    """int C_k^lam(x)^2 (1 - x^2)^(lam - 1/2) (1 - x)^s dx for 0 <= s < 1."""
    lam = _check_lam(lam, allow_zero=False)
    k = int(k)
    s = float(s)
    if k < 0:
        raise ValueError("k must be non-negative")
    if not 0.0 <= s < 1.0:
        raise ValueError("s must lie in [0, 1)")
    if s == 0.0:
        return gegenbauer_norm_integral(lam, k)

    logp = (s + 2.0 * lam) * LOG2 - 2.0 * math.lgamma(k + 1.0)
    sign = 1
    for arg, power in ((s + lam + 0.5, 1), (lam + 0.5, 1), (k - s, 1), (k + 2.0 * lam, 2),
                       (-s, -1), (2.0 * lam + s + k + 1.0, -1), (2.0 * lam, -2)):
        lg, sg = log_abs_gamma(arg)
        logp += power * lg
        if power % 2:
            sign *= sg

    total = 0.0
    term = 1.0
    for ell in range(k + 1):
        total += term
        if ell == k:
            break
        num = (-k + ell) * (k + 2.0 * lam + ell) * (s + lam + 0.5 + ell) * (s + 1.0 + ell)
        den = ((ell + 1.0) * (lam + 0.5 + ell) * (2.0 * lam + s + k + 1.0 + ell)
               * (s - k + 1.0 + ell))
        term *= num / den
    value = sign * math.exp(logp) * total
    if not value > 0:
        raise ArithmeticError("power moment of a positive integrand came out non-positive")
    return value


def J_moment(k: int, l: int) -> float:
    k, l = int(k), int(l)
    if k < 0 or l < 0:
        raise ValueError("indices must be non-negative")
    return 1.0 / (4.0 * k) if k == l and k >= 1 else 0.0


def cos_log_integral(k: int, l: int = 0) -> float:
    """(1/pi) int_{-pi}^{pi} cos(k a) cos(l a) log 1/sqrt(2 - 2 cos a) da.

    ``l = 0`` is the plain cosine moment, ``l = k`` the squared one and
    ``1 <= l < k`` the mixed one.
    """
    k, l = int(k), int(l)
    if k < 1 or not 0 <= l <= k:
        raise ValueError("need k >= 1 and 0 <= l <= k")
    if l == 0:
        return 1.0 / k
    if l == k:
        return 1.0 / (4.0 * k)
    return 0.5 * (1.0 / (k - l) + 1.0 / (k + l))


def harmonic_block_sum(n: int) -> float:
    """Closed form of sum_{k=2}^n H_{2k-1}."""
    n = int(n)
    if n < 2:
        raise ValueError("harmonic_block_sum needs n >= 2")
    return (n * harmonic(2 * n - 1) + 0.5 * harmonic(2 * n) - 0.25 * harmonic(n) - n - 0.5)


def corollary_comparison(lam, n: int, mode: str = "exact", tol=None):
    """Expected energies of (a) the (n+3)-point DPP and (b) the (n+1)-point
    DPP with the endpoints -1, +1 appended."""
    lam = _check_lam(lam)
    n = int(n)
    if mode == "exact":
        if lam != 0.0:
            raise ValueError("exact comparison is only available for lam = 0")
        first = E0_exact(n + 3)
        second = -2.0 * LOG2 + E0_exact(n + 1) + 2.0 * L3_exact(0.0, n)
        return first, second
    if mode == "numeric":
        from .quadrature import expected_energy_numeric, integrate_L3

        first = expected_energy_numeric(lam, n + 2, tol)
        second = (-2.0 * LOG2 + expected_energy_numeric(lam, n, tol)
                  + 2.0 * integrate_L3(lam, n, tol).value)
        return first, second
    raise ValueError(f"unknown mode {mode!r}")


FORMULAS = {
    FormulaId.THM12_EXACT: E0_exact,
    FormulaId.COR42: L1_cheb,
    FormulaId.LEM43: L2_cheb,
    FormulaId.THM61: L3_exact,
    FormulaId.LEM63: jacobi_power_moment,
    FormulaId.LEM64: gegenbauer_log_moment,
    FormulaId.PROP41: J_moment,
    FormulaId.LEMA4: cos_log_integral,
    FormulaId.LEMA5: harmonic_block_sum,
}


def evaluate(formula_id, *args) -> ClosedFormValue:
    fid = FormulaId(formula_id)
    return ClosedFormValue(float(FORMULAS[fid](*args)), fid)
