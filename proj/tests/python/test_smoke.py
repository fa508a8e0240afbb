import math

import numpy as np
import pytest

import dossfbm


def test_covariance_closed_form():
    assert dossfbm.covariance(0.3, 0.7, 0.5) == pytest.approx(0.3)
    assert dossfbm.covariance(1.0, 1.0, 0.3) == pytest.approx(1.0)


def test_sample_path_is_seeded():
    t, b = dossfbm.sample_path(64, 1.0, 0.35, 3)
    assert t.shape == b.shape == (65,)
    assert b[0] == 0.0
    _, again = dossfbm.sample_path(64, 1.0, 0.35, 3)
    np.testing.assert_array_equal(b, again)
    _, chol = dossfbm.sample_path(64, 1.0, 0.35, 3, generator="cholesky")
    assert chol.shape == (65,)


def test_simulate_additive_is_exact():
    out = dossfbm.simulate({"hurst": 0.4, "n": 32, "x0": 0.2,
                            "coeffs": {"family": "additive", "params": [2.0]}})
    assert out["sup_error"] <= 1e-12
    np.testing.assert_allclose(out["x_n"], 0.2 + 2.0 * out["path"][::8], atol=1e-12)


def test_simulate_trig_within_bound():
    out = dossfbm.simulate({"hurst": 0.35, "n": 64, "x0": 0.1})
    assert 0.0 < out["sup_error"]
    assert math.log(out["sup_error"]) <= out["log_bound"]
    assert "C1" in out["constants"]


def test_converge_small_grid():
    rep = dossfbm.converge({"hurst": 0.45, "bench": {
        "hurst_list": [0.45], "n_list": [8, 16, 32, 64], "seeds": 2}})
    assert len(rep["wall_times"]) == 8
    assert rep["bounds_ok"]
    assert rep["summaries"][0]["hurst"] == 0.45


def test_config_errors_raise_value_error():
    with pytest.raises(ValueError, match="hurst"):
        dossfbm.simulate({"n": 16})
    with pytest.raises(dossfbm.ConfigError):
        dossfbm.simulate({"hurst": 0.3, "rho": 0.4})
    with pytest.raises(ValueError):
        dossfbm.sample_path(8, 1.0, 1.5, 0)
