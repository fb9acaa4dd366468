import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aitest.data import Dataset
from aitest.errors import ConfigError, DataError, WeakInstrumentError
from aitest.estimators import (EstimatorConfig, FittedEffect, Method, control_function_fit,
                               predict_effect, tsls_fit)
from aitest.synth import generate, linear_iv_model, scenario_from_names
from oracles import tsls_bias


def _random_linear(seed, n=300):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=n)
    z = rng.normal(size=n) + rng.uniform(-1, 1) * u
    x = rng.uniform(1, 2) * z + u + rng.normal(size=n)
    y = rng.uniform(-2, 2) * x + u + rng.standard_t(4, size=n)
    return Dataset(x=x, y=y, z=z)


def test_tsls_equals_covariance_ratio():
    for seed in range(100):
        d = _random_linear(seed)
        z = d.z[:, 0]
        ratio = np.cov(z, d.y)[0, 1] / np.cov(z, d.x)[0, 1]
        assert tsls_fit(d).x_coefficients[0] == pytest.approx(ratio, abs=1e-10, rel=1e-10)


def test_tsls_recovers_unit_effect_with_valid_instrument():
    ld = generate(scenario_from_names("table2", "uniform"), 100_000, 11)
    assert tsls_fit(ld.data, "Z2").x_coefficients[0] == pytest.approx(1.0, abs=0.05)


def test_tsls_matches_bias_formula():
    p = dict(beta=1.0, gamma=0.8, tau=1.2, nu=0.3, rho=0.7, kappa=1.1, sd_u=1.5, sd_z=1.0)
    ld = linear_iv_model(100_000, 5, **p)
    expected = p["beta"] + tsls_bias(p["gamma"], p["tau"], p["nu"], p["rho"], p["kappa"],
                                     p["sd_u"] ** 2, p["sd_z"] ** 2)
    got = tsls_fit(ld.data).x_coefficients[0]
    assert got == pytest.approx(expected, rel=0.05)
    assert abs(got - p["beta"]) > 0.1  # the bias is real, not a rounding artefact


def test_linear_control_function_equals_tsls():
    for seed in range(30):
        d = _random_linear(seed)
        cf = control_function_fit(d, 0, EstimatorConfig(1, 1))
        assert cf.x_coefficients[0] == pytest.approx(tsls_fit(d).x_coefficients[0], abs=1e-6)


def test_control_function_recovers_quadratic():
    ld = generate(scenario_from_names("table4", fn="quadratic"), 20_000, 3)
    h = control_function_fit(ld.data, "Z2", EstimatorConfig(3, 2))
    np.testing.assert_allclose(h.x_coefficients, [-2.0, 1.0], atol=0.1)
    assert "control_coefficient" in h.diagnostics


def test_constant_instrument_is_weak():
    rng = np.random.default_rng(0)
    x = rng.normal(size=200)
    d = Dataset(x=x, y=x + rng.normal(size=200), z=np.ones(200))
    with pytest.raises(WeakInstrumentError):
        tsls_fit(d)
    with pytest.raises(WeakInstrumentError):
        control_function_fit(d)


def test_irrelevant_instrument_is_weak():
    rng = np.random.default_rng(1)
    n = 50_000
    d = Dataset(x=rng.normal(size=n), y=rng.normal(size=n), z=rng.normal(size=n))
    with pytest.raises(WeakInstrumentError, match="irrelevant"):
        tsls_fit(d)


def test_binary_treatment_gets_linear_basis():
    ld = generate(scenario_from_names("table8", violation="none"), 3000, 2)
    h = control_function_fit(ld.data, "Z")
    assert h.x_basis_degree == 1


def test_estimator_config_order_condition():
    with pytest.raises(ConfigError):
        EstimatorConfig(instrument_basis_degree=1, treatment_basis_degree=2)
    with pytest.raises(ConfigError):
        EstimatorConfig(instrument_basis_degree=2, treatment_basis_degree=0)


def test_fitted_effect_invariants():
    with pytest.raises(ConfigError):
        FittedEffect(Method.TSLS, np.array([1.0, 2.0]), np.zeros(0), 0.0)
    with pytest.raises(ConfigError):
        FittedEffect(Method.CONTROL_FUNCTION, np.zeros(0), np.zeros(0), 0.0)


def test_predict_effect_examples():
    h = FittedEffect(Method.TSLS, np.array([2.0]), np.zeros(0), 0.0)
    np.testing.assert_array_equal(predict_effect(h, [1.0, 3.0]), [2.0, 6.0])
    q = FittedEffect(Method.CONTROL_FUNCTION, np.array([-2.0, 1.0]), np.zeros(0), 1.0)
    np.testing.assert_array_equal(predict_effect(q, [1.0]), [0.0])
    hw = FittedEffect(Method.TSLS, np.array([1.0]), np.array([0.5, 0.5]), 0.0)
    with pytest.raises(DataError):
        predict_effect(hw, [1.0, 2.0], np.ones((2, 3)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(-5, 5))
def test_intercept_shift_is_additive(seed, c):
    d = _random_linear(seed, 120)
    h = control_function_fit(d)
    shifted = FittedEffect(h.method, h.x_coefficients, h.w_coefficients, h.intercept + c)
    np.testing.assert_allclose(predict_effect(shifted, d.x), predict_effect(h, d.x) + c, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["tsls", "cf"]))
def test_auxiliary_has_zero_mean(seed, which):
    rng = np.random.default_rng(seed)
    n = 200
    w = rng.normal(size=(n, 2))
    z = rng.normal(size=n) + w[:, 0]
    x = z + w @ [0.5, -1] + rng.normal(size=n)
    y = 1.5 * x + x ** 2 + w[:, 1] + rng.normal(size=n)
    d = Dataset(x=x, y=y, z=z, w=w)
    h = tsls_fit(d) if which == "tsls" else control_function_fit(d)
    a = d.y - predict_effect(h, d.x, d.w)
    assert abs(a.mean()) <= 1e-8 * (1 + np.abs(d.y).max())
