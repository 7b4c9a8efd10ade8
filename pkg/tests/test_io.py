from pathlib import Path

import numpy as np
import pytest

from wftkde.circmath import trapezoid_integral
from wftkde.estimator import fit
from wftkde.io import DataError, export_density_grid, load_csv
from wftkde.kernels import FlatTopKernel

DATA = Path(__file__).parent / "data"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_degrees_counterclockwise(tmp_path):
    p = write(tmp_path / "a.csv", "deg\n0\n90\n180\n")
    ds = load_csv(p, "deg", unit="degrees")
    assert np.allclose(ds.angles, [0, np.pi / 2, np.pi])
    assert ds.n == 3


def test_clockwise_from_north(tmp_path):
    p = write(tmp_path / "a.csv", "x\n0\n")
    assert np.allclose(load_csv(p, 0, direction="clockwise_from_north").angles, [np.pi / 2])
    p = write(tmp_path / "b.csv", "x\n90\n")
    assert np.allclose(load_csv(p, "x", unit="degrees", direction="clockwise_from_north").angles, [0.0])


def test_bad_row_named():
    with pytest.raises(DataError, match="row 4"):
        load_csv(DATA / "bad_row.csv", "direction")


def test_missing_column_and_empty(tmp_path):
    with pytest.raises(DataError, match="no column"):
        load_csv(DATA / "synthetic_cardioid.csv", "bearing")
    with pytest.raises(DataError, match="out of range"):
        load_csv(DATA / "synthetic_cardioid.csv", 7)
    with pytest.raises(DataError, match="empty"):
        load_csv(write(tmp_path / "e.csv", ""), 0)
    with pytest.raises(DataError, match="no data"):
        load_csv(write(tmp_path / "h.csv", "x\n"), 0)


def test_fixture_columns_agree():
    rad = load_csv(DATA / "synthetic_cardioid.csv", "angle_rad")
    deg = load_csv(DATA / "synthetic_cardioid.csv", "angle_deg", unit="degrees")
    assert rad.n == 500
    assert np.allclose(rad.angles, deg.angles, atol=1e-9)
    assert np.all((rad.angles >= 0) & (rad.angles < 2 * np.pi))


def test_export_uniform(tmp_path):
    est = fit([0.3, 1.0, 4.0], FlatTopKernel(0, 2))
    out = export_density_grid(est, tmp_path / "g.csv", grid_size=64)
    assert np.allclose(out, 1 / (2 * np.pi))
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "theta,density" and len(lines) == 65


def test_export_corrected(tmp_path):
    x = np.random.default_rng(1).uniform(0, 2 * np.pi, 12)
    est = fit(x, FlatTopKernel(9))
    path = tmp_path / "g.csv"
    export_density_grid(est, path, 1024, "clip_renormalize")
    dens = np.loadtxt(path, delimiter=",", skiprows=1)[:, 1]
    assert dens.min() >= 0
    assert abs(dens.sum() * 2 * np.pi / dens.size - 1) <= 1e-6
    assert np.isclose(trapezoid_integral(dens), 1, atol=1e-6)


def test_round_trip(tmp_path):
    ds = load_csv(DATA / "synthetic_cardioid.csv", "angle_rad")
    est = fit(ds.angles, FlatTopKernel(1))
    path = tmp_path / "grid.csv"
    export_density_grid(est, path, 256)
    back = load_csv(path, "theta")
    assert np.allclose(back.angles, np.arange(256) * 2 * np.pi / 256, atol=1e-12, rtol=0)


def test_export_io_error(tmp_path):
    est = fit([1.0], FlatTopKernel(0))
    with pytest.raises(OSError, match="nope"):
        export_density_grid(est, tmp_path / "nope" / "g.csv")
