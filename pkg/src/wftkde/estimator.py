"""Circular kernel density estimation with wrapped flat-top or von Mises kernels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circmath import DEFAULT_GRID, TWO_PI, ecf_sums, trapezoid_integral, uniform_grid, wrap_angle
from .kernels import FlatTopKernel, Kernel, VonMisesKernel, evaluate_kernel, kernel_coeffs

CORRECTIONS = ("none", "clip", "clip_renormalize")

_BISECT_TOL = 1e-12
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class DensityEstimate:
    """A kernel density estimate bound to its sample.

    For flat-top kernels ``ecf`` holds the empirical characteristic
    coefficients ``phi_hat_t`` for ``t = 0..kernel.support``.
    """

    sample: np.ndarray
    kernel: Kernel
    correction: str = "none"
    ecf: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.sample.size

    @property
    def is_flat_top(self) -> bool:
        return isinstance(self.kernel, FlatTopKernel)

    def eval_direct(self, theta):
        """``n^-1 sum_i K(theta - Theta_i)`` with closed-form kernel values."""
        th = np.asarray(theta, dtype=float)
        diffs = np.subtract.outer(th, self.sample)
        out = np.asarray(evaluate_kernel(diffs, self.kernel)).mean(axis=-1)
        return float(out) if out.ndim == 0 else out

    def eval_fourier(self, theta):
        """Exact Fourier-series evaluation; flat-top kernels only."""
        if not self.is_flat_top:
            raise TypeError("Fourier evaluation needs a flat-top kernel; use eval_direct")
        th = np.asarray(theta, dtype=float)
        weights = kernel_coeffs(self.kernel)[1:] * self.ecf[1:]
        ts = np.arange(1, weights.size + 1)
        phase = np.exp(-1j * np.multiply.outer(th, ts))
        out = (1.0 + 2.0 * np.real(phase @ weights)) / TWO_PI
        return float(out) if out.ndim == 0 else out

    def __call__(self, theta):
        """Raw (uncorrected) estimate; Fourier path for flat-top kernels."""
        if self.is_flat_top:
            return self.eval_fourier(theta)
        return self.eval_direct(theta)

    def grid_values(self, grid_size: int = DEFAULT_GRID, correction: Optional[str] = None):
        """Estimate on the uniform grid, corrected per ``correction`` (default: the fit's mode)."""
        mode = self.correction if correction is None else correction
        values = self(uniform_grid(grid_size))
        if mode == "none":
            return values
        return correct_grid(values, mode)


def fit(sample, kernel: Kernel, correction: str = "none") -> DensityEstimate:
    """Bind a kernel to a sample, precomputing the empirical coefficients.

    Raises ``ValueError`` for an empty sample or an unknown correction mode.
    """
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("cannot fit an empty sample")
    if correction not in CORRECTIONS:
        raise ValueError(f"unknown correction {correction!r}; expected one of {CORRECTIONS}")
    arr = np.asarray(wrap_angle(arr), dtype=float).reshape(-1)
    phi_hat = None
    if isinstance(kernel, FlatTopKernel):
        phi_hat = ecf_sums(arr, kernel.support) / arr.size
    elif not isinstance(kernel, VonMisesKernel):
        raise TypeError(f"unsupported kernel {kernel!r}")
    return DensityEstimate(arr, kernel, correction, phi_hat)


def _positive_mass(values: np.ndarray, shift: float) -> float:
    return trapezoid_integral(np.maximum(values - shift, 0.0))


def correct_grid(values, mode: str = "clip_renormalize") -> np.ndarray:
    """Nonnegativity correction of density values on a uniform circular grid.

    ``clip`` returns ``max(0, f)``. ``clip_renormalize`` returns
    ``max(0, f - xi)`` with ``xi >= 0`` found by bisection so that the result
    integrates to one; when ``f`` is already nonnegative, ``xi = 0`` and the
    input comes back unchanged.
    """
    values = np.asarray(values, dtype=float)
    if mode == "none":
        return values.copy()
    if mode not in CORRECTIONS:
        raise ValueError(f"unknown correction {mode!r}")
    if np.all(values >= 0):
        return values.copy()
    clipped = np.maximum(values, 0.0)
    if mode == "clip":
        return clipped
    mass = trapezoid_integral(clipped)
    if mass <= 1.0:
        # only reachable through quadrature error on the raw estimate
        return clipped / mass
    lo, hi = 0.0, float(values.max())
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        excess = _positive_mass(values, mid) - 1.0
        if abs(excess) <= _BISECT_TOL:
            break
        if excess > 0:
            lo = mid
        else:
            hi = mid
    return np.maximum(values - mid, 0.0)


def correct_nonneg(estimate: DensityEstimate, mode: str = "clip_renormalize",
                   grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Corrected grid values of ``estimate``; see :func:`correct_grid`."""
    return correct_grid(estimate(uniform_grid(grid_size)), mode)
