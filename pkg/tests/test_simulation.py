import csv
import json

import jsonschema
import numpy as np
import pytest

from wftkde.distributions import get_scenario, mixture_char_seq, single, uniform, wrapped_skew_normal
from wftkde.estimator import fit
from wftkde.kernels import FlatTopKernel, VonMisesKernel
from wftkde.simulation import (
    CSV_HEADER,
    REPORT_SCHEMA,
    EstimatorConfig,
    SimulationConfig,
    convergence_study,
    emit_report,
    ise,
    parse_estimators,
    rep_generator,
    run_scenario,
)
from wftkde.theory import exact_mise


def test_ise_exact_recovery():
    x = np.random.default_rng(0).uniform(0, 2 * np.pi, 50)
    est = fit(x, FlatTopKernel(0))
    spec = get_scenario("M1")
    assert ise(est, spec) == 0
    assert ise(est, spec, method="parseval") == 0


def test_ise_single_point_hand_value():
    est = fit([1.0], FlatTopKernel(1))
    spec = single(uniform())
    assert np.isclose(ise(est, spec, method="parseval"), 1 / np.pi)
    assert np.isclose(ise(est, spec), 1 / np.pi)


def test_ise_quadrature_matches_parseval_cardioid():
    spec = get_scenario("M4")
    rng = np.random.default_rng(5)
    for nu, c in [(1, 1), (3, 2), (6, 3)]:
        x = rng.uniform(0, 2 * np.pi, 60)
        est = fit(x, FlatTopKernel(nu, c))
        assert abs(ise(est, spec) - ise(est, spec, method="parseval")) <= 1e-6
    est = fit(rng.uniform(0, 2 * np.pi, 60), VonMisesKernel(4.0))
    assert abs(ise(est, spec) - ise(est, spec, method="parseval")) <= 1e-6


def test_parseval_refused_without_coefficients():
    # a very concentrated skew-normal keeps sizeable numeric coefficients past the table
    spec = single(wrapped_skew_normal(1.0, 0.005, 2.0), "narrow")
    est = fit([1.0, 2.0], FlatTopKernel(600))
    with pytest.raises(ValueError):
        ise(est, spec, method="parseval")


def test_parse_estimators():
    cfgs = parse_estimators("wsinc:er; wtrap:lscv:2;wsinc:nu=4;vonmises:kappa=5;wsinc:rule=0.25,1")
    assert [c.label for c in cfgs] == ["WS+ER", "WT+LSCV", "WS+nu=4", "VM+kappa=5", "WS+rule(tau=0.25,alpha=1)"]
    assert cfgs[1].c == 2
    for bad in ("wsinc", "wsinc:xx", "gauss:er", "wtrap:er:1", "vonmises:er", "wsinc:er:x"):
        with pytest.raises(ValueError):
            parse_estimators(bad)


def test_config_validation():
    est = (EstimatorConfig("wsinc", "lscv"),)
    with pytest.raises(ValueError):
        SimulationConfig("M1", 1, 5, est)
    with pytest.raises(ValueError):
        SimulationConfig("M1", 10, 0, est)
    with pytest.raises(KeyError):
        SimulationConfig("M99", 10, 5, est)


def test_rep_streams_independent():
    a = rep_generator(3, 0).random(4)
    b = rep_generator(3, 1).random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, rep_generator(3, 0).random(4))


def test_m1_fixed_zero_exact():
    cfg = SimulationConfig("M1", 123, 10, (EstimatorConfig("wsinc", "fixed", value=0),), seed=1)
    s = run_scenario(cfg).estimators[0]
    assert s.mean == 0 and all(v == 0 for v in s.ise)


def test_determinism_across_workers():
    cfg = SimulationConfig("M9", 80, 6, tuple(parse_estimators("wsinc:er;wtrap:lscv:2;vonmises:kappa=3")), seed=99)
    a = run_scenario(cfg, workers=1)
    b = run_scenario(cfg, workers=3)
    assert a.to_dict() == b.to_dict()


def test_ise_nonnegative_and_mean_recomputable():
    cfg = SimulationConfig("M10", 150, 20, tuple(parse_estimators("wsinc:er;wtrap:er:3;vonmises:lscv")), seed=4)
    for s in run_scenario(cfg).estimators:
        assert all(v >= 0 for v in s.ise)
        assert abs(s.mean - float(np.mean(s.ise))) <= 1e-12
        assert s.se >= 0


def test_boundary_recorded_not_fatal():
    cfg = SimulationConfig("M1", 50, 3, (EstimatorConfig("wsinc", "er"),), seed=0, er_nu_max=0)
    s = run_scenario(cfg).estimators[0]
    assert len(s.ise) == 3 and s.boundary_hits == 3


def test_failures_recorded_not_fatal(monkeypatch):
    import wftkde.simulation as sim

    real = sim.ise

    def flaky(estimate, truth, grid_size, method):
        if estimate.n == 20 and estimate.sample[0] < 1.0:
            raise ArithmeticError("synthetic failure")
        return real(estimate, truth, grid_size, method)

    monkeypatch.setattr(sim, "ise", flaky)
    cfg = SimulationConfig("M1", 20, 12, (EstimatorConfig("wsinc", "fixed", value=2),))
    s = run_scenario(cfg).estimators[0]
    assert len(s.ise) == 12 and 0 < len(s.failures) < 12
    assert all(np.isnan(s.ise[r]) for r, _ in s.failures)
    assert np.isfinite(s.mean)


def test_mc_matches_exact_mise():
    spec = get_scenario("M4")
    cfg = SimulationConfig("M4", 100, 400, (EstimatorConfig("wsinc", "fixed", value=1),), seed=3)
    s = run_scenario(cfg).estimators[0]
    exact = exact_mise(mixture_char_seq(spec), FlatTopKernel(1), 100).mise
    assert abs(s.mean - exact) <= 3 * s.se


def test_se_shrinks_with_reps():
    est = (EstimatorConfig("wsinc", "fixed", value=1),)
    se1 = run_scenario(SimulationConfig("M4", 100, 250, est, seed=1)).estimators[0].se
    se4 = run_scenario(SimulationConfig("M4", 100, 1000, est, seed=1)).estimators[0].se
    assert 0.4 <= se4 / se1 <= 0.6


def test_convergence_degenerate_m1():
    res = convergence_study("M1", [50, 100, 200], EstimatorConfig("wsinc", "fixed", value=0), reps=5)
    assert res.slope is None and res.exact_recovery


def test_emit_csv_round_trip(tmp_path):
    cfg = SimulationConfig("M4", 60, 7, tuple(parse_estimators("wsinc:er;wtrap:nu=3")), seed=2)
    report = run_scenario(cfg)
    path = tmp_path / "r.csv"
    emit_report(report, "csv", path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0].keys()) == CSV_HEADER
    for s in report.estimators:
        vals = [float(r["ise"]) for r in rows if r["estimator"] == s.config.estimator_name and r["selector"] == s.config.selector_name]
        assert abs(np.mean(vals) - s.mean) <= 1e-12


def test_emit_empty_is_header_only(tmp_path):
    report = run_scenario(SimulationConfig("M1", 10, 2, ()))
    path = tmp_path / "e.csv"
    emit_report(report, "csv", path)
    assert path.read_text().strip().splitlines() == [",".join(CSV_HEADER)]


def test_emit_json_schema(tmp_path):
    report = run_scenario(SimulationConfig("M5", 40, 4, tuple(parse_estimators("wsinc:er;vonmises:lscv")), seed=8))
    path = tmp_path / "r.json"
    emit_report(report, "json", path)
    data = json.loads(path.read_text())
    jsonschema.validate(data, REPORT_SCHEMA)
    assert np.isclose(data["estimators"][0]["mean_ise_x1e4"], report.estimators[0].mean_x1e4, rtol=1e-15)


def test_emit_io_error_names_path(tmp_path):
    report = run_scenario(SimulationConfig("M1", 10, 2, ()))
    bad = tmp_path / "missing" / "r.csv"
    with pytest.raises(OSError, match="missing"):
        emit_report(report, "csv", bad)
