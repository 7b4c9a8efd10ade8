"""Data-driven smoothing-parameter selection.

* :func:`lscv_flat_top` minimises least-squares cross-validation over integer
  ``nu`` using a closed spectral form of the criterion.
* :func:`er_selector` is the empirical rule: the first ``nu`` after which a
  window of squared empirical coefficient moduli sits below ``M log(n)/n``.
* :func:`lscv_von_mises` is the cross-validated baseline for the von Mises
  kernel, evaluated from the definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .circmath import TWO_PI, ecf_sums, trapezoid_integral, uniform_grid
from .kernels import FlatTopKernel, char_wft, eval_vm_kernel

DEFAULT_L = 30
DEFAULT_M = 1.0
DEFAULT_WINDOW = 5
DEFAULT_NU_MAX = 50
DEFAULT_KAPPA_GRID = tuple(np.geomspace(0.1, 500.0, 40))
CV_QUADRATURE_GRID = 512


@dataclass
class SelectorResult:
    chosen: float
    criterion_trace: List[Tuple[float, float]] = field(default_factory=list)
    at_boundary: bool = False


def _as_sample(sample, min_n: int = 1) -> np.ndarray:
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size < min_n:
        raise ValueError(f"selector needs at least {min_n} observations, got {arr.size}")
    return arr


def lscv_spectral(sums: np.ndarray, n: int, kernel: FlatTopKernel) -> float:
    """LSCV criterion from the sums ``S_t = sum_j exp(i t Theta_j)``.

    ``CV = (2 pi)^-1 sum_t [phi_t(K)^2 |S_t|^2 / n^2
    - 2 phi_t(K) (|S_t|^2 - n) / (n (n-1))]`` over all ``t`` with
    ``phi_t(K) != 0``; ``sums`` must reach ``kernel.support``.
    """
    ts = np.arange(kernel.support + 1)
    k = char_wft(ts, kernel)
    s2 = np.abs(sums[: ts.size]) ** 2
    terms = k * k * s2 / n**2 - 2.0 * k * (s2 - n) / (n * (n - 1))
    return float((terms[0] + 2.0 * terms[1:].sum()) / TWO_PI)


def lscv_flat_top(sample, c: int = 1, L: int = DEFAULT_L, taper: str = "linear") -> SelectorResult:
    """Least-squares cross-validation over ``nu in {0, ..., L}``; ties go to the smallest."""
    x = _as_sample(sample, 2)
    n = x.size
    top = FlatTopKernel(L, c, taper).support
    sums = ecf_sums(x, top)
    trace = []
    for nu in range(L + 1):
        trace.append((nu, lscv_spectral(sums, n, FlatTopKernel(nu, c, taper))))
    values = np.array([v for _, v in trace])
    best = int(np.argmin(values))
    return SelectorResult(chosen=best, criterion_trace=trace, at_boundary=best == L)


def er_selector(sample, M: float = DEFAULT_M, l_n: int = DEFAULT_WINDOW,
                nu_max: int = DEFAULT_NU_MAX) -> SelectorResult:
    """Empirical-rule selector.

    Returns the smallest ``nu`` with ``|phi_hat_{nu+t}|^2 < M log(n)/n`` for
    every ``t = 1..l_n``. When no ``nu <= nu_max`` qualifies the result is
    ``nu_max`` with ``at_boundary`` set.
    """
    x = _as_sample(sample, 2)
    n = x.size
    threshold = M * math.log(n) / n
    mod2 = np.abs(ecf_sums(x, nu_max + l_n) / n) ** 2
    trace = []
    for nu in range(nu_max + 1):
        window = float(mod2[nu + 1 : nu + l_n + 1].max())
        trace.append((nu, window))
        if window < threshold:
            return SelectorResult(chosen=nu, criterion_trace=trace, at_boundary=nu == nu_max)
    return SelectorResult(chosen=nu_max, criterion_trace=trace, at_boundary=True)


def lscv_von_mises(sample, kappa_grid: Optional[Sequence[float]] = None,
                   grid_size: int = CV_QUADRATURE_GRID) -> SelectorResult:
    """LSCV for the von Mises kernel over a grid of concentrations.

    ``int f_hat^2`` comes from periodic quadrature; the leave-one-out term
    from the full pairwise kernel matrix with its diagonal removed.
    """
    x = _as_sample(sample, 2)
    n = x.size
    grid_kappas = DEFAULT_KAPPA_GRID if kappa_grid is None else tuple(sorted(float(k) for k in kappa_grid))
    if not grid_kappas:
        raise ValueError("empty kappa grid")
    theta = uniform_grid(grid_size)
    grid_diffs = np.subtract.outer(theta, x)
    pair_diffs = np.subtract.outer(x, x)
    trace = []
    for kappa in grid_kappas:
        f_hat = eval_vm_kernel(grid_diffs, kappa).mean(axis=1)
        pair = eval_vm_kernel(pair_diffs, kappa)
        loo = (pair.sum() - np.trace(pair)) / (n - 1)
        trace.append((float(kappa), trapezoid_integral(f_hat**2) - 2.0 * loo / n))
    values = np.array([v for _, v in trace])
    best = int(np.argmin(values))
    return SelectorResult(
        chosen=float(grid_kappas[best]),
        criterion_trace=trace,
        at_boundary=best == len(grid_kappas) - 1,
    )
