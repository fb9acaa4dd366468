"""Auxiliary-variable independence test for a single candidate instrument.

Pipeline: estimate h(X, W) with the candidate, form A = Y - h(X, W),
strip W from the candidate with an out-of-bag forest (skipped when there
are no covariates), then test A against the residual with HSIC.  A small
p-value says the candidate cannot be a valid instrument; a large one only
says the data gave no evidence against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .data import Dataset
from .errors import CannotTestError, ConfigError, DataError
from .estimators import (EstimatorConfig, FittedEffect, control_function_fit,
                         predict_effect, tsls_fit)
from .hsic import HsicConfig, IndependenceResult, hsic_test
from .regression import residualize

AUTO = "auto"


class EffectMode(str, Enum):
    CONSTANT = "ConstantEffect"
    NONCONSTANT = "NonConstantEffect"


class Decision(str, Enum):
    REJECT = "RejectH0"
    FAIL_TO_REJECT = "FailToReject"


@dataclass(frozen=True)
class AitConfig:
    effect_mode: EffectMode = EffectMode.NONCONSTANT
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    hsic: HsicConfig | None = None
    alpha: float | str = AUTO
    seed: int = 0
    forest_trees: int = 200
    forest_min_leaf: int = 5

    def __post_init__(self):
        object.__setattr__(self, "effect_mode", EffectMode(self.effect_mode))
        if isinstance(self.alpha, str):
            if self.alpha.lower() != AUTO:
                raise ConfigError(f"alpha must be a number or 'auto', got {self.alpha!r}")
            object.__setattr__(self, "alpha", AUTO)
        elif not (0.0 < float(self.alpha) <= 0.5):
            raise ConfigError(f"alpha must lie in (0, 0.5], got {self.alpha}")
        if self.hsic is None:
            object.__setattr__(self, "hsic", HsicConfig(seed=self.seed))


@dataclass(frozen=True, eq=False)
class AitResult:
    decision: Decision
    p_value: float
    alpha_used: float
    auxiliary: np.ndarray
    residual_z: np.ndarray
    fitted: FittedEffect
    independence: IndependenceResult
    z_name: str = ""

    @property
    def rejected(self) -> bool:
        return self.decision is Decision.REJECT


def default_alpha(n: int) -> float:
    """10 / n, clipped to [1e-4, 0.1]."""
    if n < 25:
        raise DataError(f"automatic alpha needs n >= 25, got {n}")
    return min(0.1, max(1e-4, 10.0 / n))


def auxiliary_variable(d: Dataset, h: FittedEffect) -> np.ndarray:
    """A = Y - h(X, W)."""
    # an effect fitted without covariates ignores W entirely
    w = d.w if h.w_coefficients.shape[0] else None
    return d.y - predict_effect(h, d.x, w)


def _standardize(v: np.ndarray, what: str) -> np.ndarray:
    v = v - v.mean()
    s = v.std()
    if not s > 1e-12 * (1.0 + np.abs(v).max()):
        raise CannotTestError(f"{what} is numerically constant; nothing to test")
    return v / s


def fit_effect(d: Dataset, z_index, cfg: AitConfig) -> FittedEffect:
    if cfg.effect_mode is EffectMode.CONSTANT:
        return tsls_fit(d, z_index, include_covariates=cfg.estimator.include_covariates)
    return control_function_fit(d, z_index, cfg.estimator)


def ait_test(d: Dataset, z_index=0, cfg: AitConfig | None = None) -> AitResult:
    cfg = cfg or AitConfig()
    alpha = default_alpha(d.n) if cfg.alpha == AUTO else float(cfg.alpha)
    z = d.z_column(z_index)
    name = d.z_names[z_index] if isinstance(z_index, (int, np.integer)) else str(z_index)

    h = fit_effect(d, z_index, cfg)
    A = auxiliary_variable(d, h)
    if d.q:
        z_res = residualize(z, d.w, num_trees=cfg.forest_trees,
                            min_leaf=cfg.forest_min_leaf, seed=cfg.seed)
    else:
        z_res = z
    ind = hsic_test(_standardize(A, "auxiliary variable"),
                    _standardize(z_res, "residualized instrument"), cfg.hsic)
    decision = Decision.REJECT if ind.p_value < alpha else Decision.FAIL_TO_REJECT
    return AitResult(decision=decision, p_value=ind.p_value, alpha_used=alpha,
                     auxiliary=A, residual_z=z_res, fitted=h, independence=ind, z_name=name)
