"""Wrapped flat-top kernels and the von Mises baseline kernel.

A wrapped flat-top kernel ``K_{nu,c}`` is defined through its characteristic
coefficients: one on ``|t| <= floor(nu)``, a taper ``g(t; nu, c)`` on
``floor(nu) < |t| < c*floor(nu)`` and zero beyond. With ``c = 1`` the band is
empty and the kernel is the Dirichlet (wrapped sinc) kernel; with the linear
taper and ``c >= 2`` it is the wrapped trapezoid (de la Vallee Poussin type)
kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Union

import numpy as np

from .circmath import TWO_PI, log_bessel_i

_SINGULAR_EPS = 1e-8


def _linear_taper(abs_t: np.ndarray, m: int, c: int) -> np.ndarray:
    return (c - abs_t / m) / (c - 1)


TAPERS: Dict[str, Callable[[np.ndarray, int, int], np.ndarray]] = {
    "linear": _linear_taper,
}


@dataclass(frozen=True)
class FlatTopKernel:
    """Wrapped flat-top kernel with smoothing parameter ``nu`` and flatness ``c``."""

    nu: float
    c: int = 1
    taper: str = "linear"

    def __post_init__(self):
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be a finite non-negative number, got {self.nu}")
        if int(self.c) != self.c or self.c < 1:
            raise ValueError(f"c must be an integer >= 1, got {self.c}")
        object.__setattr__(self, "c", int(self.c))
        if self.taper not in TAPERS:
            raise ValueError(f"unknown taper {self.taper!r}; known: {sorted(TAPERS)}")

    @property
    def m(self) -> int:
        """``floor(nu)``; every kernel formula depends on ``nu`` only through it."""
        return int(math.floor(self.nu))

    @property
    def support(self) -> int:
        """Largest ``|t|`` with a nonzero coefficient."""
        if self.m == 0:
            return 0
        if self.c == 1:
            return self.m
        return self.c * self.m - 1

    @property
    def name(self) -> str:
        return "wsinc" if self.c == 1 else "wtrap"


@dataclass(frozen=True)
class VonMisesKernel:
    """Von Mises kernel ``exp(kappa cos theta) / (2 pi I_0(kappa))``."""

    kappa: float

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be positive and finite, got {self.kappa}")

    name = "vonmises"


Kernel = Union[FlatTopKernel, VonMisesKernel]


def char_wft(t, kernel: FlatTopKernel):
    """Characteristic coefficient ``phi_t(K_{nu,c})``; ``t`` scalar or integer array.

    At ``c = 1`` the coefficient is one on ``|t| <= floor(nu)`` and zero
    beyond (Dirichlet kernel convention).
    """
    ts = np.asarray(t)
    a = np.abs(ts).astype(float)
    m, c = kernel.m, kernel.c
    if m == 0:
        out = (a == 0).astype(float)
    elif c == 1:
        out = (a <= m).astype(float)
    else:
        out = np.zeros(a.shape)
        out[a <= m] = 1.0
        band = (a > m) & (a < c * m)
        out[band] = TAPERS[kernel.taper](a[band], m, c)
    if out.ndim == 0:
        return float(out)
    return out


def kernel_coeffs(kernel: FlatTopKernel) -> np.ndarray:
    """``phi_t(K)`` for ``t = 0..support``."""
    return char_wft(np.arange(kernel.support + 1), kernel)


def _centered(theta) -> np.ndarray:
    # map to [-pi, pi) so small offsets from 2*pi are handled as small angles
    th = np.asarray(theta, dtype=float)
    return np.mod(th + np.pi, TWO_PI) - np.pi


def _scalar_out(theta, out):
    return float(out) if np.ndim(theta) == 0 else out


def eval_wsinc(theta, nu: float):
    """Wrapped sinc (Dirichlet) kernel ``sin((m + 1/2) theta) / (2 pi sin(theta/2))``."""
    m = int(math.floor(nu))
    th = _centered(theta)
    if m == 0:
        return _scalar_out(theta, np.full(th.shape, 1.0 / TWO_PI))
    s = np.sin(th / 2)
    near = np.abs(s) < _SINGULAR_EPS
    safe = np.where(near, 1.0, s)
    out = np.sin((m + 0.5) * th) / (TWO_PI * safe)
    out = np.where(near, (2 * m + 1) / TWO_PI, out)
    return _scalar_out(theta, out)


def eval_wtrap(theta, nu: float, c: int):
    """Wrapped trapezoid kernel.

    ``[sin^2(c m theta/2) - sin^2(m theta/2)] / [2 pi (c-1) m sin^2(theta/2)]``
    with ``m = floor(nu)``; the numerator is evaluated as the product
    ``sin((c+1) m theta/2) sin((c-1) m theta/2)``.
    """
    if c < 2:
        raise ValueError("eval_wtrap needs c >= 2; use eval_wsinc for c = 1")
    m = int(math.floor(nu))
    th = _centered(theta)
    if m == 0:
        return _scalar_out(theta, np.full(th.shape, 1.0 / TWO_PI))
    s = np.sin(th / 2)
    near = np.abs(s) < _SINGULAR_EPS
    safe = np.where(near, 1.0, s)
    num = np.sin((c + 1) * m * th / 2) * np.sin((c - 1) * m * th / 2)
    out = num / (TWO_PI * (c - 1) * m * safe * safe)
    out = np.where(near, (c + 1) * m / TWO_PI, out)
    return _scalar_out(theta, out)


def kernel_fourier_eval(theta, kernel: FlatTopKernel):
    """Kernel value from its finite Fourier sum ``(2 pi)^-1 [1 + 2 sum_t phi_t cos(t theta)]``."""
    th = np.asarray(theta, dtype=float)
    coeffs = kernel_coeffs(kernel)
    ts = np.arange(1, coeffs.size)
    out = 1.0 + 2.0 * np.cos(np.multiply.outer(th, ts)) @ coeffs[1:]
    return _scalar_out(theta, out / TWO_PI)


def kernel_roughness(kernel: FlatTopKernel) -> float:
    """``int K^2 = (2 pi)^-1 sum_t phi_t(K)^2`` by Parseval."""
    coeffs = kernel_coeffs(kernel)
    return float((coeffs[0] ** 2 + 2.0 * np.sum(coeffs[1:] ** 2)) / TWO_PI)


def eval_vm_kernel(theta, kappa: float):
    """Von Mises kernel density with mean zero, computed in scaled form."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    th = np.asarray(theta, dtype=float)
    log_norm = math.log(TWO_PI) + log_bessel_i(0, kappa) - kappa
    out = np.exp(kappa * (np.cos(th) - 1.0) - log_norm)
    return _scalar_out(theta, out)


def evaluate_kernel(theta, kernel: Kernel):
    """Closed-form evaluation for any supported kernel."""
    if isinstance(kernel, VonMisesKernel):
        return eval_vm_kernel(theta, kernel.kappa)
    if kernel.c == 1:
        return eval_wsinc(theta, kernel.nu)
    if kernel.taper == "linear":
        return eval_wtrap(theta, kernel.nu, kernel.c)
    return kernel_fourier_eval(theta, kernel)
