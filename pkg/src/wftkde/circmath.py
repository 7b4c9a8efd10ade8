"""Circle arithmetic, modified Bessel functions, quadrature and Fourier coefficients.

Conventions used throughout the package:

* angles live in ``[0, 2*pi)``;
* the characteristic coefficient of a circular density ``f`` is
  ``phi_t(f) = int_0^{2pi} f(theta) exp(i t theta) dtheta`` and the empirical
  version uses the same positive exponent, ``n^-1 sum_j exp(i t Theta_j)``;
* grids are uniform with point ``k`` at ``2*pi*k/G`` (endpoint excluded).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

TWO_PI = 2.0 * np.pi
DEFAULT_GRID = 1024

_BESSEL_REL_CUTOFF = 1e-16
_BESSEL_MAX_TERMS = 500
_LOG_MAX_FLOAT = math.log(np.finfo(float).max)


def wrap_angle(x):
    """Reduce ``x`` modulo 2*pi into ``[0, 2*pi)``.

    Works for scalars and arrays. Non-finite input raises ``ValueError``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("angles must be finite")
    out = np.mod(arr, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def uniform_grid(grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Uniform grid ``2*pi*k/G``, ``k = 0..G-1``."""
    if grid_size < 1:
        raise ValueError("grid_size must be positive")
    return TWO_PI * np.arange(grid_size) / grid_size


def trapezoid_integral(values) -> float:
    """Periodic trapezoid rule over a uniform grid covering ``[0, 2*pi)``.

    On the circle the trapezoid rule reduces to ``(2*pi/G) * sum(values)``; it
    integrates trigonometric polynomials of degree below ``G`` exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 8:
        raise ValueError("need a 1-d grid with at least 8 points")
    return float(TWO_PI / values.size * values.sum())


def log_bessel_i(order: int, x: float) -> float:
    """Logarithm of the modified Bessel function ``I_order(x)`` for ``x > 0``.

    Same ascending power series as :func:`bessel_i`, summed relative to its
    first term so that it stays finite for arguments where ``I`` itself
    overflows.
    """
    order = int(order)
    if order < 0:
        raise ValueError("order must be non-negative")
    if not (x > 0 and math.isfinite(x)):
        raise ValueError("log_bessel_i needs finite x > 0")
    half = 0.5 * x
    q = half * half
    log_first = order * math.log(half) - math.lgamma(order + 1)
    # terms relative to the first one; rescale to avoid overflow for large x
    total, term, log_scale = 1.0, 1.0, 0.0
    max_terms = max(_BESSEL_MAX_TERMS, int(2 * x) + 50)
    for k in range(max_terms):
        term *= q / ((k + 1) * (k + 1 + order))
        if term < _BESSEL_REL_CUTOFF * total:
            break
        total += term
        if total > 1e250:
            total *= 1e-250
            term *= 1e-250
            log_scale += 250 * math.log(10.0)
    return log_first + math.log(total) + log_scale


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, integer order.

    Power series ``sum_k (x/2)^(2k+n) / (k! (k+n)!)``, stopped once the next
    term drops below ``1e-16`` of the running sum.

    Raises
    ------
    ValueError
        negative order or argument.
    OverflowError
        the result exceeds the double-precision range.
    """
    order = int(order)
    if order < 0 or x < 0 or not math.isfinite(x):
        raise ValueError("bessel_i needs order >= 0 and finite x >= 0")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    log_val = log_bessel_i(order, x)
    if log_val > _LOG_MAX_FLOAT:
        raise OverflowError(f"I_{order}({x}) overflows double precision")
    return math.exp(log_val)


def bessel_ratio(order, kappa: float):
    """``I_|t|(kappa) / I_0(kappa)`` for integer ``t`` (scalar or array).

    This is the t-th characteristic coefficient of a zero-mean von Mises law.
    """
    ts = np.abs(np.atleast_1d(np.asarray(order, dtype=int)))
    if kappa <= 0:
        out = (ts == 0).astype(float)
    else:
        log_i0 = log_bessel_i(0, kappa)
        cache = {}
        for t in np.unique(ts):
            cache[int(t)] = math.exp(log_bessel_i(int(t), kappa) - log_i0)
        out = np.array([cache[int(t)] for t in ts])
    if np.ndim(order) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class CharSeq:
    """Characteristic coefficients ``phi_t`` for ``t = 0..max_index``.

    Negative indices are served by Hermitian symmetry. ``truncated=False``
    means the sequence is exactly zero past ``max_index`` (finite spectral
    support). Otherwise ``tail_sq`` carries ``sum_{t > T} |phi_t|^2``: exact
    when ``tail_exact`` is set, an upper bound or estimate when not.
    ``func``, when present, regenerates coefficients so the sequence can be
    extended.
    """

    coeffs: np.ndarray
    truncated: bool = True
    tail_sq: float = 0.0
    tail_exact: bool = False
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("CharSeq needs at least phi_0")
        object.__setattr__(self, "coeffs", arr)

    @property
    def max_index(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, t: int) -> complex:
        return complex(self.values(np.array([t]))[0])

    def values(self, ts) -> np.ndarray:
        """Coefficients at integer indices ``ts``; zero beyond ``max_index``."""
        ts = np.asarray(ts, dtype=int)
        a = np.abs(ts)
        out = np.zeros(ts.shape, dtype=complex)
        inside = a <= self.max_index
        out[inside] = self.coeffs[a[inside]]
        neg = ts < 0
        out[neg] = np.conj(out[neg])
        return out

    def abs_sq(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def spectral_support(self, tol: float = 1e-12) -> Optional[int]:
        """Largest ``t`` with ``|phi_t| > tol``; ``None`` unless the support is finite."""
        if self.truncated:
            return None
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        return int(nz[-1]) if nz.size else 0

    def extend(self, max_index: int) -> "CharSeq":
        """Regenerate up to ``max_index`` from ``func`` (no-op if not longer)."""
        if max_index <= self.max_index:
            return self
        if not self.truncated:
            pad = np.zeros(max_index + 1, dtype=complex)
            pad[: self.coeffs.size] = self.coeffs
            return CharSeq(pad, truncated=False)
        if self.func is None:
            raise ValueError(
                f"coefficients known only up to t={self.max_index} and no generator to extend"
            )
        return CharSeq.from_function(self.func, max_index)

    @classmethod
    def from_function(
        cls,
        func: Callable[[np.ndarray], np.ndarray],
        max_index: int,
        tail_sq: Optional[float] = None,
        tail_exact: bool = False,
    ) -> "CharSeq":
        """Tabulate ``func`` on ``0..max_index``.

        Without an explicit ``tail_sq`` the tail is estimated by evaluating
        ``func`` over a further stretch of indices.
        """
        ts = np.arange(max_index + 1)
        coeffs = np.asarray(func(ts), dtype=complex)
        if tail_sq is None:
            extra = np.arange(max_index + 1, 4 * max_index + 64)
            tail_sq = float(np.sum(np.abs(func(extra)) ** 2))
        return cls(coeffs, truncated=True, tail_sq=tail_sq, tail_exact=tail_exact, func=func)


def fourier_coeffs_numeric(density: Callable, T: int, grid_size: int = DEFAULT_GRID) -> CharSeq:
    """Characteristic coefficients ``phi_0..phi_T`` of a density by quadrature.

    Uses the periodic trapezoid rule on a uniform grid. The result is marked
    truncated; ``tail_sq`` is estimated from the top quarter of the computed
    coefficients, which is a reliable proxy only when they have visibly decayed.

    Raises ``ValueError`` if the grid is too coarse (``grid_size < 4T``) or
    ``phi_0`` is farther than ``1e-6`` from one.
    """
    T = int(T)
    if T < 0:
        raise ValueError("T must be non-negative")
    if grid_size < max(4 * T, 8):
        raise ValueError(f"grid_size={grid_size} too small for T={T} (need >= 4T)")
    theta = uniform_grid(grid_size)
    vals = np.asarray(density(theta), dtype=float)
    ts = np.arange(T + 1)
    phase = np.exp(1j * np.outer(ts, theta))
    coeffs = (TWO_PI / grid_size) * (phase @ vals)
    if abs(coeffs[0] - 1.0) > 1e-6:
        raise ValueError(f"input does not integrate to one (phi_0 = {coeffs[0].real:.8g})")
    top = np.abs(coeffs[(3 * T) // 4 + 1 :]) ** 2
    return CharSeq(coeffs, truncated=True, tail_sq=float(top.sum()), tail_exact=False)


def ecf(sample, t):
    """Empirical characteristic function ``n^-1 sum_j exp(i t Theta_j)``.

    ``t`` may be an integer or an array of integers.
    """
    sample = np.asarray(sample, dtype=float).ravel()
    if sample.size == 0:
        raise ValueError("empty sample")
    ts = np.asarray(t)
    out = np.exp(1j * np.multiply.outer(ts, sample)).mean(axis=-1)
    if out.ndim == 0:
        return complex(out)
    return out


def ecf_sums(sample, max_index: int) -> np.ndarray:
    """Unnormalised sums ``S_t = sum_j exp(i t Theta_j)`` for ``t = 0..max_index``."""
    sample = np.asarray(sample, dtype=float).ravel()
    ts = np.arange(max_index + 1)
    return np.exp(1j * np.outer(ts, sample)).sum(axis=1)
