"""Parametric circular distributions and the M1-M20 simulation scenarios.

Every distribution exposes a density, its characteristic coefficients and a
sampler driven by a caller-supplied :class:`numpy.random.Generator`.
Wrapped normal and wrapped Cauchy laws use the mean resultant length ``rho``:
``phi_t = rho^(t^2) e^{i t mu}`` and ``rho^|t| e^{i t mu}`` respectively.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
from scipy.special import ndtr, zeta

from .circmath import TWO_PI, CharSeq, bessel_ratio, fourier_coeffs_numeric, log_bessel_i, wrap_angle

KINDS = (
    "uniform",
    "von_mises",
    "wrapped_normal",
    "cardioid",
    "wrapped_cauchy",
    "wrapped_skew_normal",
    "triangular",
    "wrapped_stable",
)

_COEFF_FLOOR_SQ = 1e-20
_WN_SERIES_CUTOFF = 1e-14
_WSN_WRAPS = 5
_WSN_GRID = 4096
_WSN_T = 512
_VM_UNIFORM_KAPPA = 1e-8


@dataclass(frozen=True)
class CircularDist:
    """A parametric circular law; build instances with the helper constructors."""

    kind: str
    params: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        _validate(self.kind, dict(self.params))

    @property
    def p(self) -> Dict[str, float]:
        return dict(self.params)

    def __str__(self):
        if not self.params:
            return self.kind
        args = ", ".join(f"{k}={v:.6g}" for k, v in self.params)
        return f"{self.kind}({args})"


def _validate(kind: str, p: Dict[str, float]) -> None:
    if kind in ("cardioid",) and not 0 <= p["rho"] <= 0.5:
        raise ValueError("cardioid rho must lie in [0, 1/2]")
    if kind == "triangular" and not 0 <= p["rho"] <= 4 / np.pi**2:
        raise ValueError("triangular rho must lie in [0, 4/pi^2]")
    if kind in ("wrapped_normal", "wrapped_cauchy") and not 0 < p["rho"] < 1:
        raise ValueError(f"{kind} rho must lie in (0, 1)")
    if kind == "von_mises" and not p["kappa"] > 0:
        raise ValueError("von Mises kappa must be positive")
    if kind == "wrapped_skew_normal" and not p["eta"] > 0:
        raise ValueError("wrapped skew-normal scale must be positive")
    if kind == "wrapped_stable":
        if not (0 < p["alpha"] <= 2 and p["tau"] > 0 and -1 <= p["beta"] <= 1):
            raise ValueError("wrapped stable needs alpha in (0, 2], tau > 0, beta in [-1, 1]")


def uniform() -> CircularDist:
    return CircularDist("uniform")


def von_mises(mu: float, kappa: float) -> CircularDist:
    return CircularDist("von_mises", (("mu", float(mu)), ("kappa", float(kappa))))


def wrapped_normal(mu: float, rho: float) -> CircularDist:
    return CircularDist("wrapped_normal", (("mu", float(mu)), ("rho", float(rho))))


def cardioid(mu: float, rho: float) -> CircularDist:
    return CircularDist("cardioid", (("mu", float(mu)), ("rho", float(rho))))


def wrapped_cauchy(mu: float, rho: float) -> CircularDist:
    return CircularDist("wrapped_cauchy", (("mu", float(mu)), ("rho", float(rho))))


def wrapped_skew_normal(xi: float, eta: float, lam: float) -> CircularDist:
    return CircularDist("wrapped_skew_normal", (("xi", float(xi)), ("eta", float(eta)), ("lam", float(lam))))


def triangular(rho: float) -> CircularDist:
    return CircularDist("triangular", (("rho", float(rho)),))


def wrapped_stable(alpha: float, tau: float, beta: float = 0.0, mu: float = 0.0) -> CircularDist:
    return CircularDist(
        "wrapped_stable",
        (("alpha", float(alpha)), ("tau", float(tau)), ("beta", float(beta)), ("mu", float(mu))),
    )


# -- characteristic coefficients ---------------------------------------------


def _closed_form_char(dist: CircularDist):
    """Vectorised ``t -> phi_t`` for kinds with a closed form, else ``None``."""
    p = dist.p
    kind = dist.kind
    if kind == "uniform":
        return lambda t: (np.asarray(t) == 0).astype(complex)
    if kind == "cardioid":
        rho, mu = p["rho"], p["mu"]

        def f(t):
            t = np.asarray(t)
            a = np.abs(t)
            return np.where(a == 0, 1.0, np.where(a == 1, rho, 0.0)) * np.exp(1j * mu * t)

        return f
    if kind == "von_mises":
        kappa, mu = p["kappa"], p["mu"]
        return lambda t: np.asarray(bessel_ratio(np.asarray(t), kappa)) * np.exp(1j * mu * np.asarray(t))
    if kind == "wrapped_normal":
        rho, mu = p["rho"], p["mu"]
        return lambda t: np.exp(np.asarray(t, dtype=float) ** 2 * math.log(rho) + 1j * mu * np.asarray(t))
    if kind == "wrapped_cauchy":
        rho, mu = p["rho"], p["mu"]
        return lambda t: np.exp(np.abs(np.asarray(t, dtype=float)) * math.log(rho) + 1j * mu * np.asarray(t))
    if kind == "triangular":
        rho = p["rho"]

        def f(t):
            a = np.abs(np.asarray(t, dtype=float))
            odd = np.mod(a, 2) == 1
            out = np.where(a == 0, 1.0, 0.0)
            return np.where(odd, rho / np.where(odd, a, 1.0) ** 2, out).astype(complex)

        return f
    if kind == "wrapped_stable":
        alpha, tau, beta, mu = p["alpha"], p["tau"], p["beta"], p["mu"]

        def f(t):
            t = np.asarray(t, dtype=float)
            a = np.abs(t)
            if alpha == 1.0:
                return np.exp(-tau * a + 1j * mu * t)
            skew = 1.0 - 1j * beta * np.sign(t) * math.tan(alpha * np.pi / 2)
            return np.exp(-(tau**alpha) * a**alpha * skew + 1j * mu * t)

        return f
    return None


def char_fn(dist: CircularDist, t):
    """Characteristic coefficient(s) ``phi_t`` of ``dist``; ``t`` integer or array."""
    f = _closed_form_char(dist)
    if f is None:
        out = char_seq(dist).values(np.atleast_1d(t))
    else:
        out = np.asarray(f(np.atleast_1d(np.asarray(t, dtype=int))), dtype=complex)
    return complex(out[0]) if np.ndim(t) == 0 else out


def _decay_index(func, floor_sq: float = _COEFF_FLOOR_SQ, start: int = 8) -> int:
    """Smallest power-of-two-ish T beyond which ``|phi_t|^2`` stays below ``floor_sq``."""
    T = start
    while T < 1 << 20:
        block = np.abs(func(np.arange(T // 2, T + 1))) ** 2
        if block[-1] < floor_sq and block.max() < floor_sq * 1e3:
            return T
        T *= 2
    return T


@functools.lru_cache(maxsize=256)
def char_seq(dist: CircularDist) -> CharSeq:
    """Characteristic sequence with a truncation index and tail information.

    Finite-support laws (uniform, cardioid) are exact. Wrapped Cauchy and
    triangular carry exact tails; others carry a bound or estimate.
    """
    p = dist.p
    kind = dist.kind
    if kind == "uniform":
        return CharSeq(np.array([1.0]), truncated=False)
    if kind == "cardioid":
        return CharSeq(np.array([1.0, p["rho"] * np.exp(1j * p["mu"])]), truncated=False)
    if kind == "wrapped_skew_normal":
        return fourier_coeffs_numeric(lambda th: density(dist, th), _WSN_T, _WSN_GRID)
    func = _closed_form_char(dist)
    if kind == "wrapped_cauchy":
        rho = p["rho"]
        T = _decay_index(func)
        tail = rho ** (2 * (T + 1)) / (1 - rho**2)
        return CharSeq.from_function(func, T, tail_sq=tail, tail_exact=True)
    if kind == "wrapped_normal":
        rho = p["rho"]
        T = _decay_index(func)
        tail = rho ** (2 * (T + 1) ** 2) / (1 - rho ** (2 * (2 * T + 3)))
        return CharSeq.from_function(func, T, tail_sq=tail, tail_exact=False)
    if kind == "triangular":
        rho = p["rho"]
        T = 4096
        # odd t = 2k+1 > T  =>  sum (2k+1)^-4 = zeta(4, k0 + 1/2) / 16
        k0 = T // 2
        tail = rho**2 * float(zeta(4.0, k0 + 0.5)) / 16.0
        return CharSeq.from_function(func, T, tail_sq=tail, tail_exact=True)
    T = _decay_index(func)
    return CharSeq.from_function(func, T)


def finite_support(dist_char: CharSeq, tol: float = 1e-12):
    """``T_f``: largest ``t`` with ``|phi_t| > tol`` when the support is finite, else ``None``."""
    return dist_char.spectral_support(tol)


# -- densities -----------------------------------------------------------------


def density(dist: CircularDist, theta):
    """Density value(s) at ``theta``."""
    th = np.asarray(theta, dtype=float)
    p = dist.p
    kind = dist.kind
    if kind == "uniform":
        out = np.full(th.shape, 1.0 / TWO_PI)
    elif kind == "cardioid":
        out = (1.0 + 2.0 * p["rho"] * np.cos(th - p["mu"])) / TWO_PI
    elif kind == "von_mises":
        kappa = p["kappa"]
        log_norm = math.log(TWO_PI) + log_bessel_i(0, kappa) - kappa
        out = np.exp(kappa * (np.cos(th - p["mu"]) - 1.0) - log_norm)
    elif kind == "wrapped_cauchy":
        rho = p["rho"]
        out = (1 - rho**2) / (TWO_PI * (1 + rho**2 - 2 * rho * np.cos(th - p["mu"])))
    elif kind == "wrapped_normal":
        rho = p["rho"]
        T = max(1, int(math.ceil(math.sqrt(math.log(_WN_SERIES_CUTOFF) / math.log(rho)))))
        ts = np.arange(1, T + 1)
        w = rho ** (ts.astype(float) ** 2)
        out = (1.0 + 2.0 * np.cos(np.multiply.outer(th - p["mu"], ts)) @ w) / TWO_PI
    elif kind == "triangular":
        rho = p["rho"]
        x = np.asarray(wrap_angle(th), dtype=float)
        out = (4 - np.pi**2 * rho + 2 * np.pi * rho * np.abs(np.pi - x)) / (8 * np.pi)
    elif kind == "wrapped_skew_normal":
        xi, eta, lam = p["xi"], p["eta"], p["lam"]
        out = np.zeros(th.shape)
        for k in range(-_WSN_WRAPS, _WSN_WRAPS + 1):
            z = (th + TWO_PI * k - xi) / eta
            out = out + 2.0 / eta * np.exp(-0.5 * z * z) / math.sqrt(TWO_PI) * ndtr(lam * z)
    elif kind == "wrapped_stable":
        cs = char_seq(dist)
        ts = np.arange(1, cs.max_index + 1)
        phase = np.exp(-1j * np.multiply.outer(th, ts))
        out = (1.0 + 2.0 * np.real(phase @ cs.coeffs[1:])) / TWO_PI
    else:  # pragma: no cover - guarded by CircularDist
        raise ValueError(kind)
    return float(out) if out.ndim == 0 else out


# -- sampling --------------------------------------------------------------------


def _sample_von_mises(rng: np.random.Generator, n: int, mu: float, kappa: float) -> np.ndarray:
    """Best-Fisher wrapped-Cauchy envelope rejection."""
    if kappa < _VM_UNIFORM_KAPPA:
        return rng.uniform(0.0, TWO_PI, n)
    r = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (r - math.sqrt(2.0 * r)) / (2.0 * kappa)
    s = (1.0 + rho * rho) / (2.0 * rho)
    out = np.empty(0)
    while out.size < n:
        m = max(16, int(1.3 * (n - out.size)))
        u1, u2, u3 = rng.random(m), rng.random(m), rng.random(m)
        z = np.cos(np.pi * u1)
        w = (1.0 + s * z) / (s + z)
        y = kappa * (s - w)
        with np.errstate(divide="ignore", invalid="ignore"):
            accept = (y * (2.0 - y) - u2 > 0) | (np.log(y / u2) + 1.0 - y >= 0)
        theta = np.sign(u3[accept] - 0.5) * np.arccos(np.clip(w[accept], -1.0, 1.0))
        out = np.concatenate([out, theta])
    return np.asarray(wrap_angle(out[:n] + mu), dtype=float)


def _sample_cardioid(rng: np.random.Generator, n: int, mu: float, rho: float) -> np.ndarray:
    out = np.empty(0)
    while out.size < n:
        m = max(16, int(1.6 * (n - out.size)))
        prop = rng.uniform(0.0, TWO_PI, m)
        ratio = (1.0 + 2.0 * rho * np.cos(prop - mu)) / (1.0 + 2.0 * rho)
        out = np.concatenate([out, prop[rng.random(m) < ratio]])
    return out[:n]


def _sample_triangular(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    # density a + b*(pi - theta) on [0, pi], mirrored on [pi, 2 pi]
    a = (4 - np.pi**2 * rho) / (8 * np.pi)
    b = rho / 4
    u = rng.random(n)
    low = np.minimum(u, 1.0 - u)
    if b == 0:
        half = low / a
    else:
        p = a + b * np.pi
        half = (p - np.sqrt(np.maximum(p * p - 2.0 * b * low, 0.0))) / b
    return np.where(u < 0.5, half, TWO_PI - half) % TWO_PI


def sample(dist: CircularDist, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` angles in ``[0, 2 pi)``; consumes only ``rng``."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    p = dist.p
    kind = dist.kind
    if kind == "uniform":
        return rng.uniform(0.0, TWO_PI, n)
    if kind == "von_mises":
        return _sample_von_mises(rng, n, p["mu"], p["kappa"])
    if kind == "wrapped_normal":
        sigma = math.sqrt(-2.0 * math.log(p["rho"]))
        return np.asarray(wrap_angle(p["mu"] + sigma * rng.standard_normal(n)), dtype=float)
    if kind == "wrapped_cauchy":
        scale = -math.log(p["rho"])
        return np.asarray(wrap_angle(p["mu"] + scale * rng.standard_cauchy(n)), dtype=float)
    if kind == "cardioid":
        return _sample_cardioid(rng, n, p["mu"], p["rho"])
    if kind == "wrapped_skew_normal":
        delta = p["lam"] / math.sqrt(1.0 + p["lam"] ** 2)
        z0, z1 = rng.standard_normal(n), rng.standard_normal(n)
        x = delta * np.abs(z0) + math.sqrt(1.0 - delta**2) * z1
        return np.asarray(wrap_angle(p["xi"] + p["eta"] * x), dtype=float)
    if kind == "triangular":
        return _sample_triangular(rng, n, p["rho"])
    if kind == "wrapped_stable":
        alpha, tau, mu = p["alpha"], p["tau"], p["mu"]
        if alpha == 2.0:
            sigma = math.sqrt(2.0) * tau
            return np.asarray(wrap_angle(mu + sigma * rng.standard_normal(n)), dtype=float)
        if alpha == 1.0:
            return np.asarray(wrap_angle(mu + tau * rng.standard_cauchy(n)), dtype=float)
        raise NotImplementedError("wrapped stable sampling is only available for alpha in {1, 2}")
    raise ValueError(kind)  # pragma: no cover


# -- scenarios -----------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    description: str
    components: Tuple[Tuple[float, CircularDist], ...]

    def __post_init__(self):
        weights = [w for w, _ in self.components]
        if not weights or min(weights) <= 0 or abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"{self.id}: weights must be positive and sum to one")

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])


def _scenario(sid: str, description: str, *components) -> ScenarioSpec:
    return ScenarioSpec(sid, description, tuple((float(w), d) for w, d in components))


def scenario_catalog() -> List[ScenarioSpec]:
    """The twenty benchmark scenarios M1-M20."""
    pi = np.pi
    vm = von_mises
    return [
        _scenario("M1", "Circular uniform", (1.0, uniform())),
        _scenario("M2", "Von Mises vM(pi, 1)", (1.0, vm(pi, 1))),
        _scenario("M3", "Wrapped normal WN(pi, 0.9)", (1.0, wrapped_normal(pi, 0.9))),
        _scenario("M4", "Cardioid C(pi, 0.5)", (1.0, cardioid(pi, 0.5))),
        _scenario("M5", "Wrapped Cauchy WC(pi, 0.8)", (1.0, wrapped_cauchy(pi, 0.8))),
        _scenario("M6", "Wrapped skew-normal WSN(pi, 1, 20)", (1.0, wrapped_skew_normal(pi, 1, 20))),
        _scenario("M7", "Mixture of two von Mises", (1 / 2, vm(0, 4)), (1 / 2, vm(pi, 4))),
        _scenario("M8", "Mixture of two von Mises", (1 / 2, vm(2, 5)), (1 / 2, vm(4, 5))),
        _scenario("M9", "Mixture of two von Mises", (1 / 4, vm(0, 2)), (3 / 4, vm(pi / math.sqrt(3), 2))),
        _scenario(
            "M10", "Mixture of von Mises and wrapped Cauchy",
            (4 / 5, vm(pi, 5)), (1 / 5, wrapped_cauchy(4 * pi / 3, 0.9)),
        ),
        _scenario(
            "M11", "Mixture of three von Mises",
            (1 / 3, vm(pi / 3, 6)), (1 / 3, vm(pi, 6)), (1 / 3, vm(5 * pi / 3, 6)),
        ),
        _scenario(
            "M12", "Mixture of three von Mises",
            (2 / 5, vm(pi / 2, 4)), (1 / 5, vm(pi, 5)), (2 / 5, vm(3 * pi / 2, 4)),
        ),
        _scenario(
            "M13", "Mixture of three von Mises",
            (2 / 5, vm(0.5, 6)), (2 / 5, vm(3, 6)), (1 / 5, vm(5, 24)),
        ),
        _scenario(
            "M14", "Mixture of four von Mises",
            (1 / 4, vm(0, 12)), (1 / 4, vm(pi / 2, 12)), (1 / 4, vm(pi, 12)), (1 / 4, vm(3 * pi / 2, 12)),
        ),
        _scenario(
            "M15", "Mixture of wrapped Cauchy, wrapped normal, von Mises and wrapped skew-normal",
            (3 / 10, wrapped_cauchy(pi - 1, 0.6)),
            (1 / 4, wrapped_normal(pi + 0.5, 0.9)),
            (1 / 4, vm(pi + 2, 3)),
            (1 / 5, wrapped_skew_normal(6, 1, 3)),
        ),
        _scenario(
            "M16", "Mixture of five von Mises",
            *[(1 / 5, vm(k * pi / 5, 18)) for k in (1, 3, 5, 7, 9)],
        ),
        _scenario(
            "M17", "Mixture of cardioid and wrapped Cauchy",
            (2 / 3, cardioid(pi, 0.5)), (1 / 3, wrapped_cauchy(pi, 0.9)),
        ),
        _scenario(
            "M18", "Mixture of four von Mises",
            (1 / 2, vm(pi, 1)), (1 / 6, vm(pi - 0.8, 30)), (1 / 6, vm(pi, 30)), (1 / 6, vm(pi + 0.8, 30)),
        ),
        _scenario(
            "M19", "Mixture of five von Mises",
            (4 / 9, vm(2, 3)), (5 / 36, vm(4, 3)), (5 / 36, vm(3.5, 50)), (5 / 36, vm(4, 50)), (5 / 36, vm(4.5, 50)),
        ),
        _scenario(
            "M20", "Mixture of two wrapped skew-normal and two wrapped Cauchy",
            (1 / 3, wrapped_skew_normal(0, 0.7, 20)),
            (1 / 3, wrapped_skew_normal(pi, 0.7, 20)),
            (1 / 6, wrapped_cauchy(3 * pi / 4, 0.9)),
            (1 / 6, wrapped_cauchy(7 * pi / 4, 0.9)),
        ),
    ]


@functools.lru_cache(maxsize=1)
def _catalog_index() -> Dict[str, ScenarioSpec]:
    return {s.id: s for s in scenario_catalog()}


def get_scenario(scenario_id: str) -> ScenarioSpec:
    """Look up ``"M1"``..``"M20"`` (case-insensitive)."""
    key = scenario_id.strip().upper()
    try:
        return _catalog_index()[key]
    except KeyError:
        raise KeyError(f"unknown scenario {scenario_id!r}; expected M1..M20") from None


def single(dist: CircularDist, sid: str = "custom") -> ScenarioSpec:
    """Wrap one distribution as a one-component scenario."""
    return ScenarioSpec(sid, str(dist), ((1.0, dist),))


def mixture_density(spec: ScenarioSpec, theta):
    out = sum(w * np.asarray(density(d, theta)) for w, d in spec.components)
    return float(out) if np.ndim(out) == 0 else out


def mixture_char(spec: ScenarioSpec, t):
    out = sum(w * np.asarray(char_fn(d, t)) for w, d in spec.components)
    return complex(out) if np.ndim(out) == 0 else out


@functools.lru_cache(maxsize=64)
def mixture_char_seq(spec: ScenarioSpec) -> CharSeq:
    """Characteristic sequence of a mixture.

    The tail bound uses ``|sum_k w_k phi_k|^2 <= sum_k w_k |phi_k|^2``.
    """
    parts = [(w, char_seq(d)) for w, d in spec.components]
    if all(not cs.truncated for _, cs in parts):
        T = max(cs.max_index for _, cs in parts)
        coeffs = sum(w * cs.extend(T).coeffs for w, cs in parts)
        return CharSeq(coeffs, truncated=False)
    T = max(cs.max_index for _, cs in parts)
    parts = [(w, cs.extend(T) if cs.func is not None or not cs.truncated else cs) for w, cs in parts]
    coeffs = np.zeros(T + 1, dtype=complex)
    tail = 0.0
    for w, cs in parts:
        coeffs[: cs.coeffs.size] += w * cs.coeffs
        if cs.truncated:
            tail += w * cs.tail_sq
    exact = len(parts) == 1 and parts[0][1].tail_exact
    return CharSeq(coeffs, truncated=True, tail_sq=tail, tail_exact=exact)


def mixture_sample(spec: ScenarioSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Categorical component labels, then per-component draws placed back in label order."""
    if len(spec.components) == 1:
        return sample(spec.components[0][1], rng, n)
    labels = rng.choice(len(spec.components), size=n, p=spec.weights)
    out = np.empty(n)
    for k, (_, dist) in enumerate(spec.components):
        idx = np.nonzero(labels == k)[0]
        if idx.size:
            out[idx] = sample(dist, rng, idx.size)
    return out
