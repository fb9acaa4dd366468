"""Two-stage least squares and the polynomial control-function estimator.

Both return a :class:`FittedEffect` describing ``h(x, w) = intercept +
sum_j b_j x**j + w @ c``, the structural function whose residual
``y - h(x, w)`` is the auxiliary variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .data import Dataset
from .errors import ConfigError, DataError, WeakInstrumentError
from .regression import ols_fit, poly_basis

WEAK_INSTRUMENT_CORR = 0.02


class Method(str, Enum):
    TSLS = "TSLS"
    CONTROL_FUNCTION = "ControlFunction"


@dataclass(frozen=True)
class EstimatorConfig:
    instrument_basis_degree: int = 3
    treatment_basis_degree: int = 2
    include_covariates: bool = True

    def __post_init__(self):
        k, d = self.instrument_basis_degree, self.treatment_basis_degree
        if d < 1 or k < d:
            raise ConfigError(
                f"need instrument degree >= treatment degree >= 1, got k={k}, d={d}")


@dataclass(frozen=True, eq=False)
class FittedEffect:
    method: Method
    x_coefficients: np.ndarray
    w_coefficients: np.ndarray
    intercept: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def x_basis_degree(self) -> int:
        return self.x_coefficients.shape[0]

    def __post_init__(self):
        if self.x_basis_degree < 1:
            raise ConfigError("effect needs at least one treatment coefficient")
        if self.method is Method.TSLS and self.x_basis_degree != 1:
            raise ConfigError("TSLS effects are linear in the treatment")


def _covariates(d: Dataset, use: bool) -> np.ndarray:
    return d.w if use else np.zeros((d.n, 0))


def _check_relevance(z: np.ndarray, x: np.ndarray, w: np.ndarray) -> float:
    """Correlation of z with x after both are linearly adjusted for w."""
    if w.shape[1]:
        x = x - ols_fit(w, x).predict(w)
        z = z - ols_fit(w, z).predict(w)
    sz, sx = z.std(), x.std()
    if sz <= 1e-12 * (1.0 + np.abs(z).max()) or sx == 0:
        raise WeakInstrumentError("candidate instrument has no variation left to use")
    r = float(np.mean((z - z.mean()) * (x - x.mean())) / (sz * sx))
    if abs(r) < WEAK_INSTRUMENT_CORR:
        raise WeakInstrumentError(
            f"instrument is irrelevant: |corr(Z, X)| = {abs(r):.4f} < {WEAK_INSTRUMENT_CORR}")
    return r


def _first_stage_f(fit_r2: float, n: int, k: int, p: int) -> float:
    if fit_r2 >= 1.0:
        return float("inf")
    return (fit_r2 / k) / ((1.0 - fit_r2) / max(n - p - 1, 1))


def tsls_fit(d: Dataset, z_index=0, include_covariates: bool = True) -> FittedEffect:
    """Constant-effect fit: regress X on [Z, W], then Y on [X-hat, W]."""
    z = d.z_column(z_index)
    w = _covariates(d, include_covariates)
    q = w.shape[1]
    if d.n <= q + 3:
        raise DataError(f"need more than {q + 3} rows, got {d.n}")
    corr = _check_relevance(z, d.x, w)

    s1 = ols_fit(np.column_stack([z, w]), d.x)
    x_hat = s1.predict(np.column_stack([z, w]))
    s2 = ols_fit(np.column_stack([x_hat, w]), d.y)
    r2 = 1.0 - np.var(d.x - x_hat) / np.var(d.x)
    resid = d.y - s2.intercept - d.x * s2.coefficients[0] - w @ s2.coefficients[1:]
    return FittedEffect(
        method=Method.TSLS,
        x_coefficients=s2.coefficients[:1].copy(),
        w_coefficients=s2.coefficients[1:].copy(),
        intercept=s2.intercept,
        diagnostics={"first_stage_f": _first_stage_f(r2, d.n, 1, 1 + q),
                     "instrument_corr": corr,
                     "residual_variance": float(np.var(resid))},
    )


def _is_binary(v: np.ndarray) -> bool:
    return np.unique(v).shape[0] <= 2


def control_function_fit(d: Dataset, z_index=0, cfg: EstimatorConfig | None = None) -> FittedEffect:
    """Non-constant effect fit.

    Stage 1 regresses X on [W, Z, ..., Z**k] and keeps the residual e1.
    Stage 2 regresses Y on [X, ..., X**d, W, e1]; the e1 coefficient soaks
    up the confounding and is left out of the returned effect.  A treatment
    with two distinct values gets d = 1 and an instrument with two distinct
    values gets k = 1, since higher powers would be collinear.
    """
    cfg = cfg or EstimatorConfig()
    z = d.z_column(z_index)
    w = _covariates(d, cfg.include_covariates)
    q = w.shape[1]
    k = 1 if _is_binary(z) else cfg.instrument_basis_degree
    deg = 1 if _is_binary(d.x) else cfg.treatment_basis_degree
    deg = min(deg, k)
    if d.n <= k + deg + q + 3:
        raise DataError(f"need more than {k + deg + q + 3} rows, got {d.n}")
    corr = _check_relevance(z, d.x, w)

    zb = poly_basis(z, k)
    s1_design = np.column_stack([w, zb])
    s1 = ols_fit(s1_design, d.x)
    e1 = d.x - s1.predict(s1_design)
    r2 = 1.0 - np.var(e1) / np.var(d.x)

    xb = poly_basis(d.x, deg)
    s2 = ols_fit(np.column_stack([xb, w, e1]), d.y)
    b = s2.coefficients
    return FittedEffect(
        method=Method.CONTROL_FUNCTION,
        x_coefficients=b[:deg].copy(),
        w_coefficients=b[deg:deg + q].copy(),
        intercept=s2.intercept,
        diagnostics={"first_stage_f": _first_stage_f(r2, d.n, k, k + q),
                     "instrument_corr": corr,
                     "control_coefficient": float(b[-1]),
                     "instrument_degree": k,
                     "residual_variance": float(np.var(d.y - s2.predict(np.column_stack([xb, w, e1]))))},
    )


def predict_effect(h: FittedEffect, x, w=None) -> np.ndarray:
    """Evaluate ``intercept + sum_j b_j x**j + w @ c``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    w = np.zeros((x.shape[0], 0)) if w is None else np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w.reshape(-1, 1)
    if w.shape[0] != x.shape[0]:
        raise DataError(f"x has {x.shape[0]} rows but w has {w.shape[0]}")
    if w.shape[1] != h.w_coefficients.shape[0]:
        raise DataError(
            f"effect was fitted with {h.w_coefficients.shape[0]} covariates, got {w.shape[1]}")
    out = h.intercept + poly_basis(x, h.x_basis_degree) @ h.x_coefficients
    if w.shape[1]:
        out = out + w @ h.w_coefficients
    return out
