"""Monte Carlo study of integrated squared error for the benchmark scenarios.

Each repetition ``r`` draws from its own generator, seeded by
``SeedSequence(seed, spawn_key=(r,))`` on NumPy's PCG64, so results do not
depend on how repetitions are spread over worker processes.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .circmath import DEFAULT_GRID, TWO_PI, bessel_ratio, ecf_sums, trapezoid_integral, uniform_grid
from .distributions import ScenarioSpec, get_scenario, mixture_char_seq, mixture_density, mixture_sample
from .estimator import DensityEstimate, fit
from .kernels import FlatTopKernel, VonMisesKernel, kernel_coeffs
from .selectors import (
    DEFAULT_L,
    DEFAULT_M,
    DEFAULT_NU_MAX,
    DEFAULT_WINDOW,
    er_selector,
    lscv_flat_top,
    lscv_von_mises,
)
from .theory import optimal_nu_exp

CSV_HEADER = ("scenario", "n", "estimator", "selector", "rep", "ise", "selected_param")
_PARSEVAL_FLOOR = 1e-14
_KERNEL_LABELS = {"wsinc": "WS", "wtrap": "WT", "vonmises": "VM"}


@dataclass(frozen=True)
class EstimatorConfig:
    """One estimator column: kernel family plus how its parameter is chosen.

    ``selector`` is ``"er"``, ``"lscv"``, ``"fixed"`` (uses ``value``) or
    ``"exp_rule"`` (``nu = floor((log(n)/tau)^(1/alpha))``).
    """

    kernel: str
    selector: str
    value: Optional[float] = None
    c: int = 1
    tau: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kernel not in _KERNEL_LABELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.selector not in ("er", "lscv", "fixed", "exp_rule"):
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.selector == "fixed" and self.value is None:
            raise ValueError("fixed selector needs a value")
        if self.selector == "exp_rule" and (self.tau is None or self.alpha is None):
            raise ValueError("exp_rule needs tau and alpha")
        if self.kernel == "vonmises" and self.selector in ("er", "exp_rule"):
            raise ValueError("the von Mises kernel supports only lscv or a fixed kappa")
        if self.kernel == "wsinc" and self.c != 1:
            raise ValueError("wsinc is the c = 1 kernel")
        if self.kernel == "wtrap" and self.c < 2:
            raise ValueError("wtrap needs c >= 2")

    @property
    def estimator_name(self) -> str:
        if self.kernel == "wtrap" and self.c != 2:
            return f"wtrap_c{self.c}"
        return self.kernel

    @property
    def selector_name(self) -> str:
        if self.selector == "fixed":
            key = "kappa" if self.kernel == "vonmises" else "nu"
            return f"{key}={self.value:g}"
        if self.selector == "exp_rule":
            return f"rule(tau={self.tau:g},alpha={self.alpha:g})"
        return self.selector

    @property
    def label(self) -> str:
        sel = self.selector.upper() if self.selector in ("er", "lscv") else self.selector_name
        return f"{_KERNEL_LABELS[self.kernel]}+{sel}"


def parse_estimators(spec: str) -> List[EstimatorConfig]:
    """Parse ``kernel:selector-or-value[:c]`` entries separated by semicolons.

    Examples: ``wsinc:er``, ``wtrap:lscv:2``, ``wsinc:nu=4``,
    ``vonmises:kappa=5``, ``wsinc:rule=0.2231,1``.
    """
    out = []
    for raw in spec.split(";"):
        entry = raw.strip()
        if not entry:
            continue
        parts = entry.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad estimator entry {entry!r}")
        kernel, sel = parts[0].strip().lower(), parts[1].strip().lower()
        default_c = 2 if kernel == "wtrap" else 1
        try:
            c = int(parts[2]) if len(parts) == 3 else default_c
        except ValueError:
            raise ValueError(f"bad flatness factor in {entry!r}") from None
        if sel in ("er", "lscv"):
            out.append(EstimatorConfig(kernel, sel, c=c))
        elif sel.startswith(("nu=", "kappa=")):
            out.append(EstimatorConfig(kernel, "fixed", value=float(sel.split("=", 1)[1]), c=c))
        elif sel.startswith("rule="):
            tau, alpha = (float(v) for v in sel.split("=", 1)[1].split(","))
            out.append(EstimatorConfig(kernel, "exp_rule", c=c, tau=tau, alpha=alpha))
        else:
            raise ValueError(f"bad selector in {entry!r}")
    return out


@dataclass(frozen=True)
class SimulationConfig:
    scenario_id: str
    n: int
    reps: int
    estimators: Tuple[EstimatorConfig, ...]
    seed: int = 0
    ise_grid: int = DEFAULT_GRID
    ise_method: str = "quadrature"
    er_M: float = DEFAULT_M
    er_window: int = DEFAULT_WINDOW
    er_nu_max: int = DEFAULT_NU_MAX
    lscv_L: int = DEFAULT_L

    def __post_init__(self):
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.n < 2 and any(e.selector in ("er", "lscv") for e in self.estimators):
            raise ValueError("data-driven selectors need n >= 2")
        if self.ise_method not in ("quadrature", "parseval"):
            raise ValueError(f"unknown ISE method {self.ise_method!r}")
        get_scenario(self.scenario_id)


@dataclass
class EstimatorSummary:
    config: EstimatorConfig
    ise: List[float] = field(default_factory=list)
    selected: List[float] = field(default_factory=list)
    boundary_hits: int = 0
    failures: List[Tuple[int, str]] = field(default_factory=list)

    def _finite(self) -> np.ndarray:
        arr = np.asarray(self.ise, dtype=float)
        return arr[np.isfinite(arr)]

    @property
    def mean(self) -> float:
        vals = self._finite()
        return float(vals.mean()) if vals.size else float("nan")

    @property
    def se(self) -> float:
        vals = self._finite()
        if vals.size < 2:
            return float("nan")
        return float(vals.std(ddof=1) / math.sqrt(vals.size))

    @property
    def mean_x1e4(self) -> float:
        return 1e4 * self.mean

    @property
    def se_x1e4(self) -> float:
        return 1e4 * self.se

    def histogram(self) -> Dict[str, int]:
        counts = Counter(self.selected)
        return {f"{k:g}": v for k, v in sorted(counts.items())}


@dataclass
class SimReport:
    scenario_id: str
    n: int
    reps: int
    seed: int
    estimators: List[EstimatorSummary]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "estimators": [
                {
                    "estimator": s.config.estimator_name,
                    "selector": s.config.selector_name,
                    "label": s.config.label,
                    "mean_ise_x1e4": s.mean_x1e4,
                    "se_x1e4": s.se_x1e4,
                    "ise": list(s.ise),
                    "selected_histogram": s.histogram(),
                    "boundary_hits": s.boundary_hits,
                    "failures": [{"rep": r, "error": e} for r, e in s.failures],
                }
                for s in self.estimators
            ],
        }


# -- ISE -------------------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _truth_on_grid(spec: ScenarioSpec, grid_size: int) -> np.ndarray:
    values = np.asarray(mixture_density(spec, uniform_grid(grid_size)), dtype=float)
    values.setflags(write=False)
    return values


def _estimate_coeffs(estimate: DensityEstimate, max_index: int) -> np.ndarray:
    """``phi_t(K) phi_hat_t`` for ``t = 0..max_index``."""
    if isinstance(estimate.kernel, FlatTopKernel):
        k = np.zeros(max_index + 1)
        kc = kernel_coeffs(estimate.kernel)
        k[: min(kc.size, max_index + 1)] = kc[: max_index + 1]
        phi_hat = np.zeros(max_index + 1, dtype=complex)
        m = min(estimate.ecf.size, max_index + 1)
        phi_hat[:m] = estimate.ecf[:m]
        return k * phi_hat
    k = np.asarray(bessel_ratio(np.arange(max_index + 1), estimate.kernel.kappa))
    return k * ecf_sums(estimate.sample, max_index) / estimate.n


def ise(estimate: DensityEstimate, truth: ScenarioSpec, grid_size: int = DEFAULT_GRID,
        method: str = "quadrature") -> float:
    """Integrated squared error of a raw estimate against the true mixture.

    ``quadrature`` integrates ``(f_hat - f)^2`` on the uniform grid;
    ``parseval`` sums ``|phi_t(K) phi_hat_t - phi_t(f)|^2 / (2 pi)`` and adds the
    truth's tail mass past the last retained index.
    """
    if method == "quadrature":
        diff = estimate(uniform_grid(grid_size)) - _truth_on_grid(truth, grid_size)
        return trapezoid_integral(diff * diff)
    if method != "parseval":
        raise ValueError(f"unknown ISE method {method!r}")
    cs = mixture_char_seq(truth)
    if isinstance(estimate.kernel, FlatTopKernel):
        top = estimate.kernel.support
    else:
        ts = np.arange(1, 4096)
        small = np.nonzero(np.asarray(bessel_ratio(ts, estimate.kernel.kappa)) < _PARSEVAL_FLOOR)[0]
        if small.size == 0:
            raise ValueError("von Mises kernel coefficients do not decay within t < 4096")
        top = int(ts[small[0]])
    T = max(top, cs.max_index)
    if cs.truncated and T > cs.max_index:
        if cs.func is not None:
            cs = cs.extend(T)
        elif cs.tail_sq > 1e-12:
            raise ValueError("truth coefficients unavailable to the required index")
    diff = _estimate_coeffs(estimate, T) - cs.values(np.arange(T + 1))
    d2 = np.abs(diff) ** 2
    tail = cs.tail_sq if cs.truncated else 0.0
    return float((d2[0] + 2.0 * (d2[1:].sum() + tail)) / TWO_PI)


# -- driver ----------------------------------------------------------------------


def rep_generator(seed: int, rep: int) -> np.random.Generator:
    """Independent generator for repetition ``rep`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def select_and_fit(sample: np.ndarray, est: EstimatorConfig, config: SimulationConfig):
    """Run the configured selector and fit; returns ``(estimate, chosen, at_boundary)``."""
    n = sample.size
    at_boundary = False
    if est.kernel == "vonmises":
        if est.selector == "lscv":
            res = lscv_von_mises(sample)
            chosen, at_boundary = res.chosen, res.at_boundary
        else:
            chosen = est.value
        return fit(sample, VonMisesKernel(chosen)), chosen, at_boundary
    if est.selector == "er":
        res = er_selector(sample, config.er_M, config.er_window, config.er_nu_max)
        chosen, at_boundary = res.chosen, res.at_boundary
    elif est.selector == "lscv":
        res = lscv_flat_top(sample, est.c, config.lscv_L)
        chosen, at_boundary = res.chosen, res.at_boundary
    elif est.selector == "exp_rule":
        chosen = optimal_nu_exp(est.tau, est.alpha, n)
    else:
        chosen = est.value
    return fit(sample, FlatTopKernel(chosen, est.c)), chosen, at_boundary


def _run_reps(config: SimulationConfig, reps: Sequence[int]):
    spec = get_scenario(config.scenario_id)
    rows = []
    for rep in reps:
        rng = rep_generator(config.seed, rep)
        x = mixture_sample(spec, rng, config.n)
        per_est = []
        for est in config.estimators:
            try:
                estimate, chosen, boundary = select_and_fit(x, est, config)
                value = ise(estimate, spec, config.ise_grid, config.ise_method)
                per_est.append((value, float(chosen), boundary, None))
            except (ValueError, ArithmeticError) as exc:
                per_est.append((float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}"))
        rows.append((rep, per_est))
    return rows


def default_workers() -> int:
    env = os.environ.get("WFTKDE_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_scenario(config: SimulationConfig, workers: Optional[int] = None) -> SimReport:
    """Monte Carlo ISE for every configured estimator.

    Per-repetition failures are recorded in the summaries (ISE ``nan``)
    rather than aborting the run.
    """
    workers = default_workers() if workers is None else max(1, int(workers))
    rep_ids = list(range(config.reps))
    if workers == 1 or config.reps == 1:
        rows = _run_reps(config, rep_ids)
    else:
        chunks = [rep_ids[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for part in pool.map(_run_reps, [config] * len(chunks), chunks) for r in part]
    rows.sort(key=lambda r: r[0])
    summaries = [EstimatorSummary(est) for est in config.estimators]
    for rep, per_est in rows:
        for summary, (value, chosen, boundary, err) in zip(summaries, per_est):
            summary.ise.append(value)
            summary.selected.append(chosen)
            summary.boundary_hits += int(boundary)
            if err is not None:
                summary.failures.append((rep, err))
    return SimReport(config.scenario_id, config.n, config.reps, config.seed, summaries)


@dataclass
class ConvergenceResult:
    scenario_id: str
    estimator: EstimatorConfig
    points: List[Tuple[int, float, float]]
    slope: Optional[float]
    exact_recovery: bool

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "estimator": self.estimator.label,
            "points": [{"n": n, "mise": m, "se": s} for n, m, s in self.points],
            "slope": self.slope,
            "exact_recovery": self.exact_recovery,
        }


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log(values)`` against ``log(ns)``."""
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


def convergence_study(scenario_id: str, n_list: Sequence[int], estimator: EstimatorConfig,
                      reps: int, seed: int = 0, workers: Optional[int] = None,
                      ise_grid: int = DEFAULT_GRID) -> ConvergenceResult:
    """Mean ISE across sample sizes and its log-log slope.

    A series that is identically zero (exact recovery) has no slope.
    """
    points = []
    for i, n in enumerate(n_list):
        cfg = SimulationConfig(scenario_id, int(n), reps, (estimator,), seed=seed + i, ise_grid=ise_grid)
        summary = run_scenario(cfg, workers).estimators[0]
        points.append((int(n), summary.mean, summary.se))
    means = np.array([m for _, m, _ in points])
    if np.all(means == 0):
        return ConvergenceResult(scenario_id, estimator, points, None, True)
    if np.any(means <= 0):
        return ConvergenceResult(scenario_id, estimator, points, None, False)
    return ConvergenceResult(scenario_id, estimator, points, loglog_slope([p[0] for p in points], means), False)


# -- output ----------------------------------------------------------------------

REPORT_SCHEMA = {
    "type": "object",
    "required": ["scenario", "n", "reps", "seed", "estimators"],
    "properties": {
        "scenario": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "reps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "estimators": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["estimator", "selector", "mean_ise_x1e4", "se_x1e4", "ise",
                             "selected_histogram", "boundary_hits", "failures"],
                "properties": {
                    "estimator": {"type": "string"},
                    "selector": {"type": "string"},
                    "label": {"type": "string"},
                    "mean_ise_x1e4": {"type": "number"},
                    "se_x1e4": {"type": "number"},
                    "ise": {"type": "array", "items": {"type": "number"}},
                    "selected_histogram": {"type": "object", "additionalProperties": {"type": "integer"}},
                    "boundary_hits": {"type": "integer", "minimum": 0},
                    "failures": {"type": "array"},
                },
            },
        },
    },
}


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def _csv_rows(report: SimReport):
    for s in report.estimators:
        for rep, (value, chosen) in enumerate(zip(s.ise, s.selected)):
            yield [report.scenario_id, report.n, s.config.estimator_name, s.config.selector_name,
                   rep, repr(float(value)), repr(float(chosen))]


def emit_report(report: SimReport, fmt: str, path) -> None:
    """Write a report as per-repetition CSV rows or a JSON summary.

    CSV columns: ``scenario,n,estimator,selector,rep,ise,selected_param``.
    Raises ``OSError`` naming the path on I/O failure.
    """
    try:
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_HEADER)
                writer.writerows(_csv_rows(report))
        elif fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(_json_safe(report.to_dict()), fh, indent=2)
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def emit_reports(reports: Sequence[SimReport], fmt: str, path) -> None:
    """Several reports in one file: CSV rows under a single header, or ``{"reports": [...]}``."""
    if len(reports) == 1:
        emit_report(reports[0], fmt, path)
        return
    try:
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_HEADER)
                for report in reports:
                    writer.writerows(_csv_rows(report))
        elif fmt == "json":
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(_json_safe({"reports": [r.to_dict() for r in reports]}), fh, indent=2)
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
