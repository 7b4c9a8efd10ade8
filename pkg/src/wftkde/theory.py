"""Exact MISE of wrapped flat-top estimators, error bounds and smoothing rules.

With ``K = K_{nu,c}`` and ``phi_t = phi_t(f)``::

    ISB = (2 pi)^-1 sum_t |phi_t|^2 |1 - phi_t(K)|^2
    IV  = (2 pi n)^-1 sum_t phi_t(K)^2 (1 - |phi_t|^2)

Both sums are finite apart from the part of ``ISB`` beyond the kernel's
spectral cut, which is taken from the sequence's tail information.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Tuple

import numpy as np

from .circmath import TWO_PI, CharSeq
from .kernels import FlatTopKernel, char_wft

# tolerated tail mass when coefficients stop short of the kernel support
_TAIL_TOLERANCE = 1e-12
_SERIES_MAX_INDEX = 1 << 20
_SERIES_REL_TOL = 1e-6


@dataclass(frozen=True)
class MiseReport:
    isb: float
    iv: float
    mise: float
    truncation_index: int
    truncation_tail_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def _coeffs_for(f_char: CharSeq, kernel: FlatTopKernel) -> CharSeq:
    need = kernel.support
    if need <= f_char.max_index:
        return f_char
    if not f_char.truncated or f_char.func is not None:
        return f_char.extend(need)
    if f_char.tail_sq > _TAIL_TOLERANCE:
        raise ValueError(
            f"coefficients known up to t={f_char.max_index} but the kernel reaches "
            f"t={need}; tail bound {f_char.tail_sq:.3g} exceeds {_TAIL_TOLERANCE:g}"
        )
    return f_char


def exact_isb(f_char: CharSeq, kernel: FlatTopKernel) -> float:
    """Integrated squared bias: taper-band and cut-tail sums over ``2 pi``."""
    cs = _coeffs_for(f_char, kernel)
    ts = np.arange(1, cs.max_index + 1)
    gap = 1.0 - char_wft(ts, kernel)
    band = np.sum(cs.abs_sq()[1:] * gap * gap)
    tail = cs.tail_sq if cs.truncated else 0.0
    return float(2.0 * (band + tail) / TWO_PI)


def exact_iv(f_char: CharSeq, kernel: FlatTopKernel, n: int) -> float:
    """Integrated variance over the kernel's nonzero coefficients."""
    if n < 1:
        raise ValueError("n must be positive")
    cs = _coeffs_for(f_char, kernel)
    ts = np.arange(1, kernel.support + 1)
    k = char_wft(ts, kernel)
    phi2 = np.abs(cs.values(ts)) ** 2
    return float(2.0 * np.sum(k * k * (1.0 - phi2)) / (TWO_PI * n))


def exact_mise(f_char: CharSeq, kernel: FlatTopKernel, n: int) -> MiseReport:
    isb = exact_isb(f_char, kernel)
    iv = exact_iv(f_char, kernel, n)
    cs = _coeffs_for(f_char, kernel)
    tail = cs.tail_sq if cs.truncated else 0.0
    return MiseReport(isb=isb, iv=iv, mise=isb + iv, truncation_index=cs.max_index,
                      truncation_tail_bound=float(2.0 * tail / TWO_PI))


def iv_bound(nu: float, c: int, n: int) -> float:
    """Upper bound ``c nu / (pi n)`` on the integrated variance."""
    return c * nu / (np.pi * n)


# -- smoothness constants ------------------------------------------------------


def _weighted_series(f_char: CharSeq, log_weight: Callable[[np.ndarray], np.ndarray]) -> Tuple[float, float]:
    """``(2 pi)^-1 sum_t w(t) |phi_t|^2`` and an estimate of the neglected tail.

    Sequences with a generator are extended until the last tenth of the
    indices contributes below ``1e-6`` of the sum or the index cap is hit.
    The remainder past the last index is closed with an integral estimate
    from a power law fitted to that last tenth; terms that do not decay
    faster than ``1/t`` are reported as divergence.
    """
    head = math.exp(log_weight(np.zeros(1))[0]) * abs(f_char.coeffs[0]) ** 2
    if not f_char.truncated:
        ts = np.arange(1, f_char.max_index + 1).astype(float)
        terms = np.exp(log_weight(ts)) * f_char.abs_sq()[1:]
        return float((head + 2 * terms.sum()) / TWO_PI), 0.0

    cs = f_char
    T = max(cs.max_index, 64)
    while True:
        if cs.func is not None and T > cs.max_index:
            cs = cs.extend(T)
        ts = np.arange(1, cs.max_index + 1).astype(float)
        with np.errstate(divide="ignore"):
            log_terms = log_weight(ts) + 2.0 * np.log(np.abs(cs.coeffs[1:]))
        terms = np.exp(log_terms)
        total = terms.sum()
        start = int(0.9 * ts.size)
        converged = total == 0 or terms[start:].sum() <= _SERIES_REL_TOL * total
        if converged or cs.func is None or cs.max_index >= _SERIES_MAX_INDEX:
            break
        T = min(2 * cs.max_index, _SERIES_MAX_INDEX)

    idx = np.arange(start, ts.size)
    nz = idx[terms[idx] > 0]
    tail = 0.0
    if nz.size >= 2:
        fit = np.polyfit(np.log(ts[nz]), np.log(terms[nz]), 1)
        p = -fit[0]
        if p <= 1.0 + 1e-3:
            if not converged:
                raise ArithmeticError(f"weighted series appears divergent (terms decay like t^-{p:.3f})")
        else:
            t_end = ts[-1]
            term_end = math.exp(np.polyval(fit, math.log(t_end)))
            tail = (nz.size / idx.size) * term_end * t_end / (p - 1.0)
    elif not converged:
        raise ArithmeticError("weighted series: cannot assess convergence")
    return float((head + 2 * (total + tail)) / TWO_PI), float(2 * tail / TWO_PI)


def smoothness_const_C_r(f_char: CharSeq, r: float) -> float:
    """``C_r(f) = (2 pi)^-1 sum_t |t|^(2r) |phi_t|^2``."""
    if r <= 0:
        raise ValueError("r must be positive")

    def log_w(t):
        with np.errstate(divide="ignore"):
            return 2.0 * r * np.log(np.abs(t))

    return _weighted_series(f_char, log_w)[0]


def exp_const_I(f_char: CharSeq, alpha: float, tau: float) -> float:
    """``I_{alpha,tau}(f) = (2 pi)^-1 sum_t exp(tau |t|^alpha) |phi_t|^2``."""
    if alpha <= 0 or tau <= 0:
        raise ValueError("alpha and tau must be positive")
    return _weighted_series(f_char, lambda t: tau * np.abs(t) ** alpha)[0]


def isb_bound_poly(C_r: float, r: float, nu: float) -> float:
    """``C_r / nu^(2r)``."""
    return C_r / nu ** (2.0 * r)


def isb_bound_exp(I: float, alpha: float, tau: float, nu: float) -> float:
    """``I exp(-tau nu^alpha)``."""
    return I * math.exp(-tau * abs(nu) ** alpha)


def mise_bound_poly(nu: float, r: float, C_r: float, c: int, n: int) -> float:
    return isb_bound_poly(C_r, r, nu) + iv_bound(nu, c, n)


def optimal_nu_poly(r: float, C_r: float, c: int, n: int) -> float:
    """Minimiser ``[2 pi r C_r n / c]^(1/(2r+1))`` of the polynomial-decay MISE bound."""
    return (2.0 * np.pi * r * C_r * n / c) ** (1.0 / (2.0 * r + 1.0))


def optimal_nu_exp(tau: float, alpha: float, n: int) -> int:
    """``floor((log(n) / tau)^(1/alpha))`` for exponentially decaying coefficients."""
    if n <= 1:
        return 0
    # guard against values such as 5.999999999 from rounding
    return int(math.floor((math.log(n) / tau) ** (1.0 / alpha) + 1e-9))
