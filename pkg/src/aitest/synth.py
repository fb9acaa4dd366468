"""Synthetic structural models with known instrument validity.

Each scenario family draws a latent confounder U, candidate instruments,
a treatment X and an outcome Y from fixed structural equations, and labels
every candidate as valid or as violating exogeneity (U causes it) or the
exclusion restriction (it enters Y directly).

Noise terms are shifted to zero population mean before entering the
equations, so sign and indicator nonlinearities see both signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError

MIN_N = 100
LOG_FLOOR = 1e-6


class Family(str, Enum):
    GAUSSIAN = "Gaussian"
    UNIFORM = "Uniform"
    T = "T"
    BETA = "Beta"
    GAMMA = "Gamma"
    LOGNORMAL = "LogNormal"
    EXPONENTIAL = "Exponential"
    MIXED = "Mixed"


_DEFAULT_PARAMS = {
    Family.GAUSSIAN: (0.0, 1.0),     # mean, sd
    Family.UNIFORM: (-2.0, 2.0),     # low, high
    Family.T: (5.0,),                # df
    Family.BETA: (0.5, 0.1),         # a, b
    Family.GAMMA: (2.0, 1.0),        # shape, scale
    Family.LOGNORMAL: (0.0, 1.0),    # mu, sigma of log
    Family.EXPONENTIAL: (0.5,),      # rate
    Family.MIXED: (),
}

# families a Mixed term chooses between
MIXED_POOL = (Family.GAUSSIAN, Family.UNIFORM, Family.T, Family.BETA, Family.GAMMA, Family.LOGNORMAL)


@dataclass(frozen=True)
class NoiseDistribution:
    family: Family = Family.GAUSSIAN
    params: tuple = ()

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        params = tuple(float(p) for p in self.params) or _DEFAULT_PARAMS[fam]
        object.__setattr__(self, "params", params)
        if len(params) != len(_DEFAULT_PARAMS[fam]):
            raise ConfigError(f"{fam.value} takes {len(_DEFAULT_PARAMS[fam])} parameters, got {len(params)}")
        bad = {
            Family.GAUSSIAN: lambda m, s: s <= 0,
            Family.UNIFORM: lambda lo, hi: not lo < hi,
            Family.T: lambda df: df <= 2,
            Family.BETA: lambda a, b: a <= 0 or b <= 0,
            Family.GAMMA: lambda k, s: k <= 0 or s <= 0,
            Family.LOGNORMAL: lambda m, s: s <= 0,
            Family.EXPONENTIAL: lambda r: r <= 0,
            Family.MIXED: lambda: False,
        }[fam](*params)
        if bad or not all(np.isfinite(params)):
            raise ConfigError(f"invalid parameters for {fam.value}: {params}")

    @property
    def mean(self) -> float:
        p = self.params
        return {
            Family.GAUSSIAN: lambda: p[0],
            Family.UNIFORM: lambda: (p[0] + p[1]) / 2,
            Family.T: lambda: 0.0,
            Family.BETA: lambda: p[0] / (p[0] + p[1]),
            Family.GAMMA: lambda: p[0] * p[1],
            Family.LOGNORMAL: lambda: float(np.exp(p[0] + p[1] ** 2 / 2)),
            Family.EXPONENTIAL: lambda: 1.0 / p[0],
            Family.MIXED: lambda: float("nan"),
        }[self.family]()

    @property
    def variance(self) -> float:
        p = self.params
        return {
            Family.GAUSSIAN: lambda: p[1] ** 2,
            Family.UNIFORM: lambda: (p[1] - p[0]) ** 2 / 12,
            Family.T: lambda: p[0] / (p[0] - 2),
            Family.BETA: lambda: p[0] * p[1] / ((p[0] + p[1]) ** 2 * (p[0] + p[1] + 1)),
            Family.GAMMA: lambda: p[0] * p[1] ** 2,
            Family.LOGNORMAL: lambda: float((np.exp(p[1] ** 2) - 1) * np.exp(2 * p[0] + p[1] ** 2)),
            Family.EXPONENTIAL: lambda: 1.0 / p[0] ** 2,
            Family.MIXED: lambda: float("nan"),
        }[self.family]()

    def resolve(self, rng: np.random.Generator) -> "NoiseDistribution":
        """A concrete distribution: Mixed picks one pool family at default parameters."""
        if self.family is not Family.MIXED:
            return self
        return NoiseDistribution(MIXED_POOL[int(rng.integers(len(MIXED_POOL)))])


def sample_noise(dist: NoiseDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. draws (uncentered)."""
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")
    dist = dist.resolve(rng)
    p = dist.params
    f = dist.family
    if f is Family.GAUSSIAN:
        return rng.normal(p[0], p[1], n)
    if f is Family.UNIFORM:
        return rng.uniform(p[0], p[1], n)
    if f is Family.T:
        return rng.standard_t(p[0], n)
    if f is Family.BETA:
        # with a small second shape a few percent of the mass lies within one ulp of 1,
        # which rounds to 1.0; keep such draws at the largest double inside the support
        return np.clip(rng.beta(p[0], p[1], n), np.finfo(np.float64).tiny, np.nextafter(1.0, 0.0))
    if f is Family.GAMMA:
        return rng.gamma(p[0], p[1], n)
    if f is Family.LOGNORMAL:
        return rng.lognormal(p[0], p[1], n)
    return rng.exponential(1.0 / p[0], n)


def centered_noise(dist: NoiseDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    dist = dist.resolve(rng)
    return sample_noise(dist, n, rng) - dist.mean


# -- nonlinear functions ------------------------------------------------------

def _log(v):
    return np.log(np.maximum(np.abs(v), LOG_FLOOR))


def _indicator(v):
    return (v > v.mean()).astype(np.float64)


_TABLE_FNS: dict[str, dict[str, Callable[[np.ndarray], np.ndarray]]] = {
    "exogeneity_constant": {
        "Log": lambda x: _log(0.2 * np.abs(x) - 1),
        "Quadratic": lambda x: x ** 2 - 2 * x + 1,
        "Cubic": lambda x: x ** 3 - 0.5 * x ** 2 + 0.2 * x,
        "LogQuadratic": lambda x: _log(0.5 * x ** 2 + x),
        "ExpQuadratic": lambda x: np.exp(0.3 * x ** 2 + x),
    },
    "exogeneity_nonconstant": {
        "Log": lambda x: _log(0.5 * np.abs(x)),
        "Quadratic": lambda x: x ** 2 - 2 * x + 1,
        "Cubic": lambda x: 0.01 * x ** 3 - 0.5 * x ** 2 + 0.2 * x,
        "LogQuadratic": lambda x: 0.1 * _log(0.5 * x ** 2 - 1) - 2,
        "ExpQuadratic": lambda x: np.exp(0.3 * x ** 2 + x),
    },
    "exclusion_constant": {
        "Log": lambda x: _log(0.2 * np.abs(x)) - 2,
        "Quadratic": lambda x: 0.2 * x ** 2 + 2 * x - 2,
        "Cubic": lambda x: 0.01 * x ** 3 - x - 6,
        "LogQuadratic": lambda x: _log(0.5 * x ** 2 + x - 0.1),
        "ExpQuadratic": lambda x: np.exp(0.3 * x ** 2 + x) - 0.1,
    },
    "exclusion_nonconstant": {
        "Log": lambda x: _log(0.2 * np.abs(x) - 2) - 1,
        "Quadratic": lambda x: 0.2 * x ** 2 + 2 * x - 2,
        "Cubic": lambda x: 0.01 * x ** 3 - x - 6,
        "LogQuadratic": lambda x: _log(0.5 * x ** 2 + x - 1),
        "ExpQuadratic": lambda x: np.exp(0.2 * x ** 2) - 3,
    },
    "generic": {
        "Sign": np.sign,
        "Indicator": _indicator,
        "Identity": lambda x: np.asarray(x, dtype=np.float64).copy(),
    },
    "pool": {
        "Cos": np.cos,
        "Sin": np.sin,
        "Square": lambda x: x ** 2,
        "CubicPoly": lambda x: x ** 3,
        "Logarithmic": _log,
        "Exponential": np.exp,
    },
}

TABLE_FN_NAMES = ("Log", "Quadratic", "Cubic", "LogQuadratic", "ExpQuadratic")
POOL_FN_NAMES = tuple(_TABLE_FNS["pool"])


@dataclass(frozen=True)
class NonlinearFn:
    name: str
    variant: str = "generic"

    def __post_init__(self):
        if self.variant not in _TABLE_FNS:
            raise ConfigError(f"unknown function variant {self.variant!r}")
        if self.name not in _TABLE_FNS[self.variant]:
            raise ConfigError(f"unknown function {self.name!r} for variant {self.variant!r}")


def eval_fn(f: NonlinearFn, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        return _TABLE_FNS[f.variant][f.name](x)


# -- scenarios --------------------------------------------------------------

class ScenarioFamily(str, Enum):
    LINEAR_EXOGENEITY = "LinearExogeneity"
    NONLIN_CONST_EXOGENEITY = "NonlinConstExogeneity"
    NONLIN_NONCONST_EXOGENEITY = "NonlinNonConstExogeneity"
    NONLIN_CONST_EXCLUSION = "NonlinConstExclusion"
    NONLIN_NONCONST_EXCLUSION = "NonlinNonConstExclusion"
    COVARIATE_LINEAR = "CovariateLinear"
    DISCRETE_TREATMENT = "DiscreteTreatment"


class Validity(str, Enum):
    VALID = "Valid"
    INVALID_EXOGENEITY = "InvalidExogeneity"
    INVALID_EXCLUSION = "InvalidExclusion"

    @property
    def is_valid(self) -> bool:
        return self is Validity.VALID


class Violation(str, Enum):
    NONE = "none"
    EXOGENEITY = "exogeneity"
    EXCLUSION = "exclusion"
    BOTH = "both"


_FN_VARIANT = {
    ScenarioFamily.NONLIN_CONST_EXOGENEITY: "exogeneity_constant",
    ScenarioFamily.NONLIN_NONCONST_EXOGENEITY: "exogeneity_nonconstant",
    ScenarioFamily.NONLIN_CONST_EXCLUSION: "exclusion_constant",
    ScenarioFamily.NONLIN_NONCONST_EXCLUSION: "exclusion_nonconstant",
}

_DEFAULT_NOISE = {
    ScenarioFamily.LINEAR_EXOGENEITY: Family.GAUSSIAN,
    ScenarioFamily.NONLIN_CONST_EXOGENEITY: Family.GAUSSIAN,
    ScenarioFamily.NONLIN_NONCONST_EXOGENEITY: Family.UNIFORM,
    ScenarioFamily.NONLIN_CONST_EXCLUSION: Family.BETA,
    ScenarioFamily.NONLIN_NONCONST_EXCLUSION: Family.BETA,
    ScenarioFamily.COVARIATE_LINEAR: Family.T,
    ScenarioFamily.DISCRETE_TREATMENT: Family.GAUSSIAN,
}

# whether the constant-effect estimator is the right one for the family
CONSTANT_EFFECT = {
    ScenarioFamily.LINEAR_EXOGENEITY: True,
    ScenarioFamily.NONLIN_CONST_EXOGENEITY: True,
    ScenarioFamily.NONLIN_NONCONST_EXOGENEITY: False,
    ScenarioFamily.NONLIN_CONST_EXCLUSION: True,
    ScenarioFamily.NONLIN_NONCONST_EXCLUSION: False,
    ScenarioFamily.COVARIATE_LINEAR: True,
    ScenarioFamily.DISCRETE_TREATMENT: True,
}


@dataclass(frozen=True)
class ScenarioSpec:
    family: ScenarioFamily
    noise: NoiseDistribution | None = None
    fn_choice: NonlinearFn | None = None
    covariate_dim: int = 0
    coefficient_rule: str = ""
    true_beta: float = 1.0
    violation: Violation = Violation.NONE

    def __post_init__(self):
        fam = ScenarioFamily(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "violation", Violation(self.violation))
        if self.noise is None:
            object.__setattr__(self, "noise", NoiseDistribution(_DEFAULT_NOISE[fam]))
        if not self.coefficient_rule:
            rule = "uniform" if fam in (ScenarioFamily.LINEAR_EXOGENEITY,
                                        ScenarioFamily.NONLIN_CONST_EXCLUSION) else "fixed"
            object.__setattr__(self, "coefficient_rule", rule)
        if self.coefficient_rule not in ("fixed", "uniform"):
            raise ConfigError(f"coefficient_rule must be 'fixed' or 'uniform', got {self.coefficient_rule!r}")
        if fam in _FN_VARIANT:
            fn = self.fn_choice or NonlinearFn("Quadratic", _FN_VARIANT[fam])
            if isinstance(fn, str):
                fn = NonlinearFn(fn, _FN_VARIANT[fam])
            if fn.variant != _FN_VARIANT[fam]:
                raise ConfigError(f"{fam.value} needs a {_FN_VARIANT[fam]!r} function, got {fn.variant!r}")
            object.__setattr__(self, "fn_choice", fn)
        elif self.fn_choice is not None:
            raise ConfigError(f"{fam.value} takes no function choice")
        if fam is ScenarioFamily.COVARIATE_LINEAR:
            if self.covariate_dim not in (2, 3, 5):
                raise ConfigError(f"covariate dimension must be 2, 3 or 5, got {self.covariate_dim}")
        elif self.covariate_dim != 0:
            raise ConfigError(f"{fam.value} has no covariates")
        if fam is not ScenarioFamily.DISCRETE_TREATMENT and self.violation is not Violation.NONE:
            raise ConfigError("violation switches only apply to the discrete-treatment family")
        if fam is ScenarioFamily.DISCRETE_TREATMENT and self.noise.family is not Family.GAUSSIAN:
            raise ConfigError("the discrete-treatment family uses Gaussian noise")

    @property
    def constant_effect(self) -> bool:
        return CONSTANT_EFFECT[self.family]

    def label(self) -> str:
        parts = [self.family.value, self.noise.family.value]
        if self.fn_choice is not None:
            parts.append(self.fn_choice.name)
        if self.covariate_dim:
            parts.append(f"q{self.covariate_dim}")
        if self.family is ScenarioFamily.DISCRETE_TREATMENT:
            parts.append(self.violation.value)
        return "/".join(parts)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    data: Dataset
    validity: dict
    latent_u: np.ndarray
    spec_echo: ScenarioSpec | None
    seed: int
    coefficients: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        meta = {"seed": self.seed, "n": self.data.n}
        if self.spec_echo is not None:
            meta["scenario"] = self.spec_echo.label()
        meta.update({f"label.{k}": v.value for k, v in self.validity.items()})
        meta.update({f"coef.{k}": repr(float(v)) for k, v in self.coefficients.items()})
        meta.update({f"fn.{k}": v for k, v in self.functions.items()})
        return meta


def _coefs(rule: str, names, rng) -> dict:
    if rule == "fixed":
        return {k: 1.0 for k in names}
    return {k: float(rng.uniform(0.5, 1.5)) for k in names}


def _labeled(spec, seed, u, z, names, labels, x, y, w=None, coefs=None, fns=None):
    d = Dataset(x=x, y=y, z=np.column_stack(z), w=w, z_names=names,
                w_names=tuple(f"W{j + 1}" for j in range(w.shape[1])) if w is not None else ())
    return LabeledDataset(data=d, validity=dict(zip(names, labels)), latent_u=u,
                          spec_echo=spec, seed=seed, coefficients=coefs or {}, functions=fns or {})


def generate(spec: ScenarioSpec, n: int, seed: int) -> LabeledDataset:
    """Draw one dataset of size n from the scenario; identical for identical seeds."""
    if n < MIN_N:
        raise DataError(f"generators need n >= {MIN_N}, got {n}")
    rng = np.random.default_rng(int(seed))
    fam = spec.family
    noise = lambda: centered_noise(spec.noise, n, rng)  # noqa: E731

    if fam is ScenarioFamily.LINEAR_EXOGENEITY or fam is ScenarioFamily.NONLIN_CONST_EXOGENEITY \
            or fam is ScenarioFamily.NONLIN_NONCONST_EXOGENEITY:
        c = _coefs(spec.coefficient_rule, ("gamma", "tau1", "tau2", "rho", "kappa"), rng)
        u = noise()
        if fam is ScenarioFamily.NONLIN_CONST_EXOGENEITY:
            z1 = eval_fn(spec.fn_choice, u) + noise()
        else:
            z1 = c["gamma"] * u + noise()
        z2 = noise()
        x = c["tau1"] * z1 + c["tau2"] * z2 + c["rho"] * u + noise()
        fx = eval_fn(spec.fn_choice, x) if fam is ScenarioFamily.NONLIN_NONCONST_EXOGENEITY \
            else spec.true_beta * x
        y = fx + c["kappa"] * u + noise()
        return _labeled(spec, seed, u, [z1, z2], ("Z1", "Z2"),
                        (Validity.INVALID_EXOGENEITY, Validity.VALID), x, y, coefs=c)

    if fam is ScenarioFamily.NONLIN_CONST_EXCLUSION:
        c = _coefs(spec.coefficient_rule, ("rho", "kappa"), rng)
        g = spec.fn_choice
        u, z1, z2 = noise(), noise(), noise()
        x = np.sign(z1) + eval_fn(g, z2) + c["rho"] * u + noise()
        y = spec.true_beta * x + eval_fn(g, z1) + c["kappa"] * u + noise()
        return _labeled(spec, seed, u, [z1, z2], ("Z1", "Z2"),
                        (Validity.INVALID_EXCLUSION, Validity.VALID), x, y, coefs=c)

    if fam is ScenarioFamily.NONLIN_NONCONST_EXCLUSION:
        g = spec.fn_choice
        u, z1, z2 = noise(), noise(), noise()
        x = np.sign(z1) + eval_fn(g, z2) + eval_fn(g, u) + noise()
        y = eval_fn(g, x) + eval_fn(g, z1) + eval_fn(g, u) + noise()
        return _labeled(spec, seed, u, [z1, z2], ("Z1", "Z2"),
                        (Validity.INVALID_EXCLUSION, Validity.VALID), x, y)

    if fam is ScenarioFamily.COVARIATE_LINEAR:
        q = spec.covariate_dim
        t5 = NoiseDistribution(Family.T, (5.0,))
        u = centered_noise(t5, n, rng)
        w = rng.normal(size=(n, q))
        lam = rng.normal(size=q)
        lam = lam / np.linalg.norm(lam)
        ws = w.sum(axis=1)
        z1 = _indicator(u + ws + centered_noise(NoiseDistribution(Family.BETA), n, rng))
        z2 = _indicator(ws + rng.normal(size=n))
        # U confounds X and Y through both noise terms
        delta = u + centered_noise(t5, n, rng)
        eps = u + centered_noise(t5, n, rng)
        x = 0.5 * z1 + 0.5 * z2 + w @ lam + delta
        y = spec.true_beta * x + ws + eps
        coefs = {f"lambda{j + 1}": lam[j] for j in range(q)}
        return _labeled(spec, seed, u, [z1, z2], ("Z1", "Z2"),
                        (Validity.INVALID_EXOGENEITY, Validity.VALID), x, y, w=w, coefs=coefs)

    # discrete treatment
    picks = rng.integers(len(POOL_FN_NAMES), size=5)
    names = dict(zip(("phi_Z", "g_X", "phi_X", "g_Y", "phi_Y"), (POOL_FN_NAMES[i] for i in picks)))
    f = {k: NonlinearFn(v, "pool") for k, v in names.items()}
    exo = spec.violation in (Violation.EXOGENEITY, Violation.BOTH)
    excl = spec.violation in (Violation.EXCLUSION, Violation.BOTH)
    u = rng.normal(size=n)
    ez, ex, ey = rng.normal(size=(3, n))
    z = _indicator((eval_fn(f["phi_Z"], u) if exo else 0.0) + ez)
    x = _indicator(eval_fn(f["g_X"], z) + eval_fn(f["phi_X"], u) + ex)
    y = spec.true_beta * x + (eval_fn(f["g_Y"], z) if excl else 0.0) + eval_fn(f["phi_Y"], u) + ey
    label = Validity.INVALID_EXOGENEITY if exo else (Validity.INVALID_EXCLUSION if excl else Validity.VALID)
    used = {k: v for k, v in names.items()
            if not (k == "phi_Z" and not exo) and not (k == "g_Y" and not excl)}
    return _labeled(spec, seed, u, [z], ("Z",), (label,), x, y, fns=used)


class MotivatingKind(str, Enum):
    LINEAR_GAUSSIAN = "LinearGaussian"
    LINEAR_PARTIAL_NON_GAUSSIAN = "LinearPartialNonGaussian"
    PARTIAL_NONLINEAR_GAUSSIAN = "PartialNonlinearGaussian"


def motivating_example(kind: MotivatingKind, n: int, seed: int) -> LabeledDataset:
    """Z = 2U + e (or exp(U) + e), X = 1.5Z + 0.8U + e, Y = X + 3.5U + e; Z is confounded."""
    kind = MotivatingKind(kind)
    if n < MIN_N:
        raise DataError(f"generators need n >= {MIN_N}, got {n}")
    rng = np.random.default_rng(int(seed))
    if kind is MotivatingKind.LINEAR_PARTIAL_NON_GAUSSIAN:
        u = centered_noise(NoiseDistribution(Family.EXPONENTIAL, (0.5,)), n, rng)
    else:
        u = rng.normal(size=n)
    ez, ex, ey = rng.normal(size=(3, n))
    z = (np.exp(u) if kind is MotivatingKind.PARTIAL_NONLINEAR_GAUSSIAN else 2.0 * u) + ez
    x = 1.5 * z + 0.8 * u + ex
    y = x + 3.5 * u + ey
    d = Dataset(x=x, y=y, z=z.reshape(-1, 1), z_names=("Z",))
    return LabeledDataset(data=d, validity={"Z": Validity.INVALID_EXOGENEITY}, latent_u=u,
                          spec_echo=None, seed=int(seed),
                          coefficients={"gamma": 2.0, "tau": 1.5, "rho": 0.8, "kappa": 3.5})


def linear_iv_model(n: int, seed: int, *, beta=1.0, gamma=1.0, tau=1.0, nu=0.0, rho=1.0,
                    kappa=1.0, sd_u=1.0, sd_z=1.0, sd_x=1.0, sd_y=1.0) -> LabeledDataset:
    """Gaussian linear model Z = gamma U + e, X = tau Z + rho U + e, Y = beta X + nu Z + kappa U + e."""
    if n < MIN_N:
        raise DataError(f"generators need n >= {MIN_N}, got {n}")
    rng = np.random.default_rng(int(seed))
    u = sd_u * rng.normal(size=n)
    z = gamma * u + sd_z * rng.normal(size=n)
    x = tau * z + rho * u + sd_x * rng.normal(size=n)
    y = beta * x + nu * z + kappa * u + sd_y * rng.normal(size=n)
    if gamma != 0:
        label = Validity.INVALID_EXOGENEITY
    elif nu != 0:
        label = Validity.INVALID_EXCLUSION
    else:
        label = Validity.VALID
    d = Dataset(x=x, y=y, z=z.reshape(-1, 1), z_names=("Z",))
    return LabeledDataset(data=d, validity={"Z": label}, latent_u=u, spec_echo=None, seed=int(seed),
                          coefficients=dict(beta=beta, gamma=gamma, tau=tau, nu=nu, rho=rho, kappa=kappa))


# -- named scenarios (CLI and bench) ----------------------------------------

SCENARIO_KEYS = {
    "table2": ScenarioFamily.LINEAR_EXOGENEITY,
    "table3": ScenarioFamily.NONLIN_CONST_EXOGENEITY,
    "table4": ScenarioFamily.NONLIN_NONCONST_EXOGENEITY,
    "table5": ScenarioFamily.NONLIN_CONST_EXCLUSION,
    "table6": ScenarioFamily.NONLIN_NONCONST_EXCLUSION,
    "table7": ScenarioFamily.COVARIATE_LINEAR,
    "table8": ScenarioFamily.DISCRETE_TREATMENT,
}


def _lookup(options, value: str, what: str):
    for opt in options:
        if opt.lower() == value.lower():
            return opt
    raise ConfigError(f"unknown {what} {value!r}; choose from {', '.join(options)}")


def scenario_from_names(scenario: str, dist: str | None = None, fn: str | None = None,
                        q: int | None = None, violation: str | None = None) -> ScenarioSpec:
    """Build a spec from short CLI-style names, e.g. ``('table2', 'uniform')``."""
    key = _lookup(list(SCENARIO_KEYS) + [f.value for f in ScenarioFamily], scenario, "scenario")
    fam = SCENARIO_KEYS.get(key) or ScenarioFamily(key)
    kwargs = {}
    if dist is not None:
        kwargs["noise"] = NoiseDistribution(Family(_lookup([f.value for f in Family], dist, "distribution")))
    if fn is not None:
        if fam not in _FN_VARIANT:
            raise ConfigError(f"{fam.value} takes no function choice")
        kwargs["fn_choice"] = NonlinearFn(_lookup(TABLE_FN_NAMES, fn, "function"), _FN_VARIANT[fam])
    if fam is ScenarioFamily.COVARIATE_LINEAR:
        kwargs["covariate_dim"] = 2 if q is None else int(q)
    elif q:
        raise ConfigError(f"{fam.value} has no covariates")
    if violation is not None:
        kwargs["violation"] = Violation(_lookup([v.value for v in Violation], violation, "violation"))
    elif fam is ScenarioFamily.DISCRETE_TREATMENT:
        kwargs["violation"] = Violation.BOTH
    return ScenarioSpec(fam, **kwargs)


def with_violation(spec: ScenarioSpec, violation: Violation) -> ScenarioSpec:
    return replace(spec, violation=violation)
