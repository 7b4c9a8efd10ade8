"""Independent reference computations shared by the test modules."""

import numpy as np

from wftkde.circmath import trapezoid_integral, uniform_grid
from wftkde.kernels import evaluate_kernel


def definitional_cv(sample, kernel, grid_size=512):
    """LSCV from its definition: quadrature of f_hat^2 minus twice the leave-one-out mean."""
    x = np.asarray(sample, dtype=float)
    n = x.size
    th = uniform_grid(grid_size)
    f_hat = np.array([np.mean([evaluate_kernel(t - xi, kernel) for xi in x]) for t in th])
    loo = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            if j != i:
                s += evaluate_kernel(x[i] - x[j], kernel)
        loo += s / (n - 1)
    return trapezoid_integral(f_hat**2) - 2.0 * loo / n


def definitional_cv_fast(sample, kernel, grid_size=512):
    """Same criterion with vectorised pairwise sums, for larger fixtures."""
    x = np.asarray(sample, dtype=float)
    n = x.size
    th = uniform_grid(grid_size)
    f_hat = evaluate_kernel(np.subtract.outer(th, x), kernel).mean(axis=1)
    pair = evaluate_kernel(np.subtract.outer(x, x), kernel)
    loo = (pair.sum() - np.trace(pair)) / (n - 1)
    return trapezoid_integral(f_hat**2) - 2.0 * loo / n
