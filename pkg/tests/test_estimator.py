import numpy as np
import pytest

from wftkde.circmath import trapezoid_integral, uniform_grid
from wftkde.distributions import sample, von_mises
from wftkde.estimator import correct_grid, correct_nonneg, fit
from wftkde.kernels import FlatTopKernel, VonMisesKernel

TWO_PI = 2 * np.pi


def test_uniform_kernel_gives_uniform_density():
    x = np.random.default_rng(0).uniform(0, TWO_PI, 13)
    est = fit(x, FlatTopKernel(0, 2))
    th = uniform_grid(32)
    assert np.allclose(est(th), 1 / TWO_PI)
    assert np.allclose(est.eval_direct(th), 1 / TWO_PI)


def test_single_point_peak():
    est = fit([np.pi], FlatTopKernel(4, 1))
    assert np.isclose(est(np.pi), 9 / TWO_PI)
    est = fit([0.0], FlatTopKernel(1, 1))
    assert np.isclose(est.eval_fourier(0.0), 3 / TWO_PI)


def test_dual_path_vm_sample():
    x = sample(von_mises(np.pi, 1), np.random.default_rng(3), 100)
    est = fit(x, FlatTopKernel(4, 2))
    th = uniform_grid(64)
    assert np.max(np.abs(est.eval_direct(th) - est.eval_fourier(th))) <= 1e-9


def test_dual_path_random_fixtures():
    rng = np.random.default_rng(11)
    th = uniform_grid(128)
    for _ in range(50):
        n = int(rng.choice([5, 50, 500]))
        x = rng.uniform(0, TWO_PI, n)
        est = fit(x, FlatTopKernel(int(rng.integers(0, 11)), int(rng.integers(1, 4))))
        assert np.max(np.abs(est.eval_direct(th) - est.eval_fourier(th))) <= 1e-9


def test_mass_preservation():
    x = np.random.default_rng(5).uniform(0, TWO_PI, 40)
    for kernel in (FlatTopKernel(7, 1), FlatTopKernel(7, 3), VonMisesKernel(15.0)):
        assert abs(trapezoid_integral(fit(x, kernel)(uniform_grid(2048))) - 1) <= 1e-8


def test_symmetric_two_point_sample():
    mu, a = 2.0, 0.4
    est = fit([mu - a, mu + a], FlatTopKernel(6, 2))
    xs = np.linspace(0, 3, 11)
    assert np.allclose(est(mu + xs), est(mu - xs), atol=1e-13)


def test_rotation_equivariance():
    x = np.random.default_rng(8).uniform(0, TWO_PI, 25)
    delta = 1.234
    th = uniform_grid(64)
    for kernel in (FlatTopKernel(5, 2), VonMisesKernel(3.0)):
        a = fit(x, kernel)(th)
        b = fit(np.mod(x + delta, TWO_PI), kernel)(th + delta)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_fit_errors():
    with pytest.raises(ValueError):
        fit([], FlatTopKernel(1))
    with pytest.raises(ValueError):
        fit([1.0], FlatTopKernel(1), correction="abs")
    with pytest.raises(TypeError):
        fit([1.0], VonMisesKernel(1.0)).eval_fourier(0.0)


def test_correction_identity_when_nonnegative():
    est = fit([1.0, 2.0], FlatTopKernel(0))
    raw = est(uniform_grid(256))
    assert np.array_equal(correct_nonneg(est, grid_size=256), raw)
    cardioid_like = (1 + 0.8 * np.cos(uniform_grid(256))) / TWO_PI
    assert np.array_equal(correct_grid(cardioid_like), cardioid_like)


def bisect_oracle(values, target=1.0):
    # independent root-finder on the shift: scipy brentq
    from scipy.optimize import brentq

    g = lambda s: trapezoid_integral(np.maximum(values - s, 0)) - target
    return brentq(g, 0, values.max(), xtol=1e-15)


def test_correction_renormalizes_synthetic_grid():
    th = uniform_grid(1024)
    raw = (1 + 1.6 * np.cos(th)) / TWO_PI  # dips below zero
    clipped_mass = trapezoid_integral(np.maximum(raw, 0))
    assert clipped_mass > 1
    out = correct_grid(raw, "clip_renormalize")
    assert out.min() >= 0
    assert abs(trapezoid_integral(out) - 1) <= 1e-6
    assert np.allclose(out, np.maximum(raw - bisect_oracle(raw), 0), atol=1e-10)


def test_correction_mass_105():
    th = uniform_grid(512)
    # scale a dipping curve so the clipped mass is 1.05
    base = np.cos(th) + 0.2
    scale = 1.05 / trapezoid_integral(np.maximum(base, 0))
    raw = scale * base
    assert np.isclose(trapezoid_integral(np.maximum(raw, 0)), 1.05)
    out = correct_grid(raw)
    assert out.min() >= 0
    assert abs(trapezoid_integral(out) - 1) <= 1e-6


def test_clip_mode():
    raw = np.array([-1.0, 0.5, 2.0, -0.1, 0.0, 1.0, 3.0, 0.2])
    assert np.array_equal(correct_grid(raw, "clip"), np.maximum(raw, 0))


def test_estimate_with_correction_mode():
    x = np.random.default_rng(2).uniform(0, TWO_PI, 15)
    est = fit(x, FlatTopKernel(10, 1), correction="clip_renormalize")
    vals = est.grid_values(1024)
    assert vals.min() >= 0
    assert abs(trapezoid_integral(vals) - 1) <= 1e-6
