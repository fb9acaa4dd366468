"""Auxiliary-variable independence test for candidate instrumental variables."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .ait import AitConfig, AitResult, Decision, EffectMode, ait_test, auxiliary_variable, default_alpha
from .data import ColumnRoles, Dataset, center, load_csv, write_csv
from .errors import (AitError, CannotTestError, ConfigError, DataError, DegenerateInputError,
                     SingularDesignError, StatisticalPreconditionError, WeakInstrumentError)
from .estimators import EstimatorConfig, FittedEffect, Method, control_function_fit, predict_effect, tsls_fit
from .hsic import (HsicConfig, HsicMethod, IndependenceResult, hsic_statistic, hsic_test,
                   hsic_test_gamma, hsic_test_large_scale, hsic_test_permutation, median_bandwidth)
from .regression import (ForestModel, LinearFit, forest_fit, forest_oob_predict, forest_predict,
                         ols_fit, poly_basis, residualize)

__all__ = [
    "BACKEND", "AitConfig", "AitResult", "Decision", "EffectMode", "ait_test", "auxiliary_variable",
    "default_alpha", "ColumnRoles", "Dataset", "center", "load_csv", "write_csv", "AitError",
    "CannotTestError", "ConfigError", "DataError", "DegenerateInputError", "SingularDesignError",
    "StatisticalPreconditionError", "WeakInstrumentError", "EstimatorConfig", "FittedEffect", "Method",
    "control_function_fit", "predict_effect", "tsls_fit", "HsicConfig", "HsicMethod",
    "IndependenceResult", "hsic_statistic", "hsic_test", "hsic_test_gamma", "hsic_test_large_scale",
    "hsic_test_permutation", "median_bandwidth", "ForestModel", "LinearFit", "forest_fit",
    "forest_oob_predict", "forest_predict", "ols_fit", "poly_basis", "residualize",
]
