import json
from pathlib import Path

import numpy as np
import pytest

from aitest.errors import ConfigError, DataError
from aitest.synth import (Family, MotivatingKind, NoiseDistribution, NonlinearFn, ScenarioFamily,
                          ScenarioSpec, Validity, Violation, centered_noise, eval_fn, generate,
                          linear_iv_model, motivating_example, sample_noise, scenario_from_names)

GOLDEN = json.loads((Path(__file__).parent / "data" / "golden_fns.json").read_text())


@pytest.mark.parametrize("case", GOLDEN, ids=lambda c: f"{c['variant']}-{c['name']}")
def test_functions_match_golden_values(case):
    got = eval_fn(NonlinearFn(case["name"], case["variant"]), case["x"])
    np.testing.assert_allclose(got, case["y"], rtol=1e-12, atol=1e-12)


def test_unknown_function_rejected():
    with pytest.raises(ConfigError):
        NonlinearFn("Tanh")
    with pytest.raises(ConfigError):
        NonlinearFn("Quadratic", "nonsense")


CONCRETE = [f for f in Family if f is not Family.MIXED]


@pytest.mark.parametrize("family", CONCRETE)
def test_noise_moments(family):
    dist = NoiseDistribution(family)
    n = 100_000
    draws = sample_noise(dist, n, np.random.default_rng(0))
    se = np.sqrt(dist.variance / n)
    assert abs(draws.mean() - dist.mean) <= 3 * se
    c = centered_noise(dist, n, np.random.default_rng(1))
    assert abs(c.mean()) <= 3 * se
    if family is not Family.LOGNORMAL:  # its fourth moment makes the sample variance too noisy
        kurt = np.mean((draws - draws.mean()) ** 4) / draws.var() ** 2
        assert abs(draws.var() - dist.variance) <= 3 * dist.variance * np.sqrt((kurt - 1) / n)


def test_beta_support_and_invalid_parameters():
    b = sample_noise(NoiseDistribution(Family.BETA), 10_000, np.random.default_rng(2))
    assert np.all((b > 0) & (b < 1))
    with pytest.raises(ConfigError):
        NoiseDistribution(Family.T, (1.0,))
    with pytest.raises(ConfigError):
        NoiseDistribution(Family.UNIFORM, (1.0, 1.0))
    with pytest.raises(ConfigError):
        NoiseDistribution(Family.GAUSSIAN, (0.0, 1.0, 2.0))


def test_mixed_resolves_to_a_pool_family():
    rng = np.random.default_rng(3)
    seen = {NoiseDistribution(Family.MIXED).resolve(rng).family for _ in range(200)}
    assert Family.MIXED not in seen and len(seen) == 6


def test_table2_layout_and_labels():
    ld = generate(scenario_from_names("table2", "gaussian"), 10_000, 4)
    assert ld.data.z_names == ("Z1", "Z2")
    assert ld.validity == {"Z1": Validity.INVALID_EXOGENEITY, "Z2": Validity.VALID}
    u = ld.latent_u
    slope = np.polyfit(u, ld.data.z_column("Z1"), 1)[0]
    assert 0.5 <= slope <= 1.5
    assert abs(np.corrcoef(u, ld.data.z_column("Z2"))[0, 1]) < 0.05


def test_discrete_treatment_is_binary():
    ld = generate(scenario_from_names("table8", violation="none"), 2000, 5)
    assert set(np.unique(ld.data.x)) <= {0.0, 1.0}
    assert set(np.unique(ld.data.z)) <= {0.0, 1.0}
    assert ld.validity["Z"] is Validity.VALID
    assert "phi_Z" not in ld.functions and "g_Y" not in ld.functions


def test_violation_switch_sets_label():
    for v, lab in [("exogeneity", Validity.INVALID_EXOGENEITY), ("exclusion", Validity.INVALID_EXCLUSION),
                   ("both", Validity.INVALID_EXOGENEITY)]:
        assert generate(scenario_from_names("table8", violation=v), 200, 0).validity["Z"] is lab


def test_generator_preconditions():
    with pytest.raises(DataError):
        generate(scenario_from_names("table2"), 50, 0)
    with pytest.raises(DataError):
        motivating_example(MotivatingKind.LINEAR_GAUSSIAN, 99, 0)
    with pytest.raises(ConfigError):
        scenario_from_names("table9")
    with pytest.raises(ConfigError):
        scenario_from_names("table2", fn="quadratic")
    with pytest.raises(ConfigError):
        ScenarioSpec(ScenarioFamily.COVARIATE_LINEAR, covariate_dim=4)
    with pytest.raises(ConfigError):
        ScenarioSpec(ScenarioFamily.LINEAR_EXOGENEITY, violation=Violation.BOTH)


@pytest.mark.parametrize("key", ["table2", "table3", "table4", "table5", "table6", "table7", "table8"])
def test_generation_is_deterministic(key):
    spec = scenario_from_names(key)
    a, b, c = generate(spec, 300, 9), generate(spec, 300, 9), generate(spec, 300, 10)
    np.testing.assert_array_equal(a.data.y, b.data.y)
    np.testing.assert_array_equal(a.data.z, b.data.z)
    assert a.metadata() == b.metadata()
    assert not np.array_equal(a.data.y, c.data.y)


@pytest.mark.parametrize("key", ["table2", "table3", "table4", "table7"])
def test_exogeneity_labels_are_sound(key):
    ld = generate(scenario_from_names(key), 10_000, 6)
    u = ld.latent_u
    for name, lab in ld.validity.items():
        z = ld.data.z_column(name)
        # a confounded candidate moves with U through some transform; a valid one does not
        dep = max(abs(np.corrcoef(u, z)[0, 1]), abs(np.corrcoef(u ** 2, z)[0, 1]))
        if lab is Validity.VALID:
            assert dep < 0.05, name
        else:
            assert dep > 0.1, name


def test_exclusion_labels_are_sound():
    spec = scenario_from_names("table5", fn="quadratic")
    ld = generate(spec, 10_000, 7)
    d, c = ld.data, ld.coefficients
    # Y minus everything except the direct instrument term and noise
    direct = d.y - spec.true_beta * d.x - c["kappa"] * ld.latent_u
    g = spec.fn_choice
    assert abs(np.corrcoef(direct, eval_fn(g, d.z_column("Z1")))[0, 1]) > 0.1
    assert abs(np.corrcoef(direct, eval_fn(g, d.z_column("Z2")))[0, 1]) < 0.05
    assert abs(np.corrcoef(ld.latent_u, d.z_column("Z1"))[0, 1]) < 0.05


def test_motivating_examples_and_linear_model_labels():
    for kind in MotivatingKind:
        ld = motivating_example(kind, 500, 1)
        assert ld.validity["Z"] is Validity.INVALID_EXOGENEITY
    assert linear_iv_model(200, 0, gamma=0.0).validity["Z"] is Validity.VALID
    assert linear_iv_model(200, 0, gamma=0.0, nu=0.5).validity["Z"] is Validity.INVALID_EXCLUSION


def test_covariate_layout():
    ld = generate(scenario_from_names("table7", q=3), 500, 2)
    assert ld.data.q == 3 and ld.data.w_names == ("W1", "W2", "W3")
    lam = np.array([ld.coefficients[f"lambda{j}"] for j in (1, 2, 3)])
    assert np.linalg.norm(lam) == pytest.approx(1.0)
