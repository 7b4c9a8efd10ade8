"""Wrapped flat-top kernel density estimation for circular data."""

from .circmath import CharSeq, bessel_i, ecf, trapezoid_integral, uniform_grid, wrap_angle
from .distributions import (
    CircularDist,
    ScenarioSpec,
    char_fn,
    char_seq,
    density,
    get_scenario,
    mixture_char,
    mixture_char_seq,
    mixture_density,
    mixture_sample,
    sample,
    scenario_catalog,
)
from .estimator import DensityEstimate, correct_grid, correct_nonneg, fit
from .io import AngleDataset, DataError, export_density_grid, load_csv
from .kernels import FlatTopKernel, VonMisesKernel, char_wft, evaluate_kernel, kernel_roughness
from .selectors import SelectorResult, er_selector, lscv_flat_top, lscv_von_mises
from .simulation import (
    EstimatorConfig,
    SimReport,
    SimulationConfig,
    convergence_study,
    emit_report,
    ise,
    parse_estimators,
    run_scenario,
)
from .theory import (
    MiseReport,
    exact_isb,
    exact_iv,
    exact_mise,
    exp_const_I,
    isb_bound_exp,
    isb_bound_poly,
    iv_bound,
    optimal_nu_exp,
    optimal_nu_poly,
    smoothness_const_C_r,
)

__version__ = "0.1.0"
