import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wftkde.circmath import bessel_i, trapezoid_integral, uniform_grid
from wftkde.kernels import (
    FlatTopKernel,
    VonMisesKernel,
    char_wft,
    eval_vm_kernel,
    eval_wsinc,
    eval_wtrap,
    evaluate_kernel,
    kernel_fourier_eval,
    kernel_roughness,
)

TWO_PI = 2 * np.pi


def brute_fourier(theta, nu, c):
    # coefficients straight from the piecewise definition
    m = int(np.floor(nu))
    total = 0.0
    for t in range(-c * m - 1, c * m + 2):
        if abs(t) <= m:
            k = 1.0
        elif c > 1 and abs(t) < c * m:
            k = (c - abs(t) / m) / (c - 1)
        else:
            k = 0.0
        total += k * np.cos(t * theta)
    return total / TWO_PI


def test_char_wft_examples():
    assert char_wft(3, FlatTopKernel(4, 2)) == 1
    assert char_wft(6, FlatTopKernel(4, 2)) == 0.5
    assert char_wft(8, FlatTopKernel(4, 2)) == 0


@given(st.integers(-60, 60), st.floats(0, 15), st.integers(1, 4))
def test_char_wft_symmetric(t, nu, c):
    k = FlatTopKernel(nu, c)
    assert char_wft(t, k) == char_wft(-t, k)


def test_support():
    assert FlatTopKernel(4, 1).support == 4
    assert FlatTopKernel(4, 2).support == 7
    assert FlatTopKernel(0.7, 3).support == 0


def test_kernel_validation():
    with pytest.raises(ValueError):
        FlatTopKernel(-1)
    with pytest.raises(ValueError):
        FlatTopKernel(2, 0)
    with pytest.raises(ValueError):
        FlatTopKernel(2, 2, taper="cosine")
    with pytest.raises(ValueError):
        VonMisesKernel(0)
    with pytest.raises(ValueError):
        eval_wtrap(0.0, 4, 1)


def test_wsinc_examples():
    assert np.isclose(eval_wsinc(0.0, 4), 9 / TWO_PI)
    assert np.isclose(eval_wsinc(np.pi, 0), 1 / TWO_PI)
    assert np.isclose(eval_wsinc(np.pi / 3, 2), 1 / TWO_PI)
    assert np.isclose(eval_wsinc(np.pi / 3, 2), brute_fourier(np.pi / 3, 2, 1))


def test_wtrap_examples():
    assert np.isclose(eval_wtrap(0.0, 4, 2), 12 / TWO_PI)
    assert np.isclose(eval_wtrap(np.pi / 2, 0, 2), 1 / TWO_PI)
    assert abs(eval_wtrap(1.0, 4, 2) - kernel_fourier_eval(1.0, FlatTopKernel(4, 2))) <= 1e-10


def test_fourier_eval_examples():
    assert np.isclose(kernel_fourier_eval(0.0, FlatTopKernel(4, 1)), 9 / TWO_PI)
    assert np.isclose(kernel_fourier_eval(0.0, FlatTopKernel(4, 2)), 12 / TWO_PI)
    for c in (1, 2, 3):
        assert np.isclose(kernel_fourier_eval(2.2, FlatTopKernel(0, c)), 1 / TWO_PI)


def test_near_singularity_is_continuous():
    for theta in (1e-9, 2 * np.pi - 1e-9, 1e-7):
        assert np.isclose(eval_wsinc(theta, 6), kernel_fourier_eval(theta, FlatTopKernel(6)), rtol=1e-9)
        assert np.isclose(eval_wtrap(theta, 6, 3), kernel_fourier_eval(theta, FlatTopKernel(6, 3)), rtol=1e-9)


def test_closed_form_matches_fourier_random():
    rng = np.random.default_rng(42)
    for _ in range(100):
        theta = rng.uniform(-10, 10)
        nu = rng.uniform(0, 15)
        c = int(rng.integers(1, 5))
        k = FlatTopKernel(nu, c)
        fourier = kernel_fourier_eval(theta, k)
        closed = eval_wsinc(theta, nu) if c == 1 else eval_wtrap(theta, nu, c)
        assert abs(closed - fourier) <= 1e-10
        assert np.isclose(fourier, brute_fourier(theta, nu, c), atol=1e-12)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 2.7, 4, 10])
@pytest.mark.parametrize("c", [1, 2, 3])
def test_normalization(nu, c):
    vals = evaluate_kernel(uniform_grid(2048), FlatTopKernel(nu, c))
    assert abs(trapezoid_integral(vals) - 1) <= 1e-9


def test_floor_invariance():
    th = uniform_grid(64)
    for c in (1, 2, 3):
        a = evaluate_kernel(th, FlatTopKernel(4.0, c))
        b = evaluate_kernel(th, FlatTopKernel(4.9, c))
        assert np.array_equal(a, b)


def test_roughness_examples():
    assert np.isclose(kernel_roughness(FlatTopKernel(4, 1)), 9 / TWO_PI)
    assert np.isclose(kernel_roughness(FlatTopKernel(4, 2)), 10.75 / TWO_PI)
    assert np.isclose(kernel_roughness(FlatTopKernel(0, 2)), 1 / TWO_PI)


def test_roughness_matches_quadrature():
    k = FlatTopKernel(5, 3)
    vals = evaluate_kernel(uniform_grid(1024), k)
    assert np.isclose(trapezoid_integral(vals**2), kernel_roughness(k), rtol=1e-12)


@pytest.mark.parametrize("c", [2, 3, 4])
def test_roughness_bound_tapered(c):
    for nu in np.arange(1, 20, 0.25):
        assert kernel_roughness(FlatTopKernel(nu, c)) <= c * nu / np.pi


def test_roughness_sinc_exceeds_bound_at_integer_nu():
    # R = (2m+1)/(2 pi) while c nu / pi = 2m/(2 pi) at nu = m
    for m in range(1, 10):
        assert np.isclose(kernel_roughness(FlatTopKernel(m, 1)), (2 * m + 1) / TWO_PI)
        assert kernel_roughness(FlatTopKernel(m, 1)) > m / np.pi
        assert kernel_roughness(FlatTopKernel(m + 0.5, 1)) <= (m + 0.5) / np.pi


def test_vm_kernel_examples():
    assert np.isclose(eval_vm_kernel(0.0, 1e-10), 1 / TWO_PI)
    assert np.isclose(eval_vm_kernel(np.pi, 1.0), np.exp(-1) / (TWO_PI * bessel_i(0, 1.0)))
    for kappa in (0.3, 5.0, 80.0, 700.0):
        vals = eval_vm_kernel(uniform_grid(4096), kappa)
        assert abs(trapezoid_integral(vals) - 1) <= 1e-9


def test_vm_kernel_dispatch():
    th = np.linspace(0, 6, 7)
    assert np.allclose(evaluate_kernel(th, VonMisesKernel(2.0)), eval_vm_kernel(th, 2.0))
