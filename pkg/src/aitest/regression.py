"""Least squares, polynomial bases and a bagged regression forest.

The forest is only used to strip covariate signal from an instrument, so it
exposes out-of-bag predictions alongside the usual ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError, SingularDesignError

COND_LIMIT = 1e12

_M64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def poly_basis(v, degree: int) -> np.ndarray:
    """Columns ``v, v**2, ..., v**degree`` (no constant column)."""
    if degree < 1:
        raise ConfigError(f"polynomial degree must be >= 1, got {degree}")
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.shape[0] < 1:
        raise DataError("empty vector")
    return np.column_stack([v ** j for j in range(1, degree + 1)])


@dataclass(frozen=True)
class LinearFit:
    coefficients: np.ndarray
    intercept: float
    column_labels: tuple[str, ...] = ()

    def predict(self, design) -> np.ndarray:
        design = np.asarray(design, dtype=np.float64)
        if design.ndim == 1:
            design = design.reshape(-1, 1)
        if design.shape[1] != self.coefficients.shape[0]:
            raise DataError(
                f"design has {design.shape[1]} columns, fit expects {self.coefficients.shape[0]}")
        return self.intercept + design @ self.coefficients


def ols_fit(design, target, labels: Sequence[str] | None = None) -> LinearFit:
    """Least squares with an intercept, solved through a QR factorization.

    Columns are scaled to unit norm before factorizing; a scaled design whose
    condition number exceeds ``COND_LIMIT`` is rejected.
    """
    design = np.asarray(design, dtype=np.float64)
    if design.ndim == 1:
        design = design.reshape(-1, 1)
    target = np.asarray(target, dtype=np.float64).reshape(-1)
    n, p = design.shape
    if target.shape[0] != n:
        raise DataError(f"design has {n} rows but target has {target.shape[0]}")
    if n <= p + 1:
        raise DataError(f"need more than {p + 1} rows for {p} regressors, got {n}")

    A = np.column_stack([np.ones(n), design])
    norms = np.sqrt(np.einsum("ij,ij->j", A, A))
    if np.any(norms == 0):
        raise SingularDesignError("design has an all-zero column")
    As = A / norms
    Q, R = np.linalg.qr(As, mode="reduced")
    sv = np.linalg.svd(R, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > COND_LIMIT:
        raise SingularDesignError(
            f"design is rank deficient (condition number {sv[0] / max(sv[-1], 1e-300):.3g})")
    beta = np.linalg.solve(R, Q.T @ target) / norms
    if not np.all(np.isfinite(beta)):
        raise SingularDesignError("non-finite least-squares solution")
    labels = tuple(labels) if labels is not None else tuple(f"x{j}" for j in range(p))
    return LinearFit(coefficients=beta[1:], intercept=float(beta[0]), column_labels=labels)


# -- forest -----------------------------------------------------------------

def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _stream(state: int, count: int) -> np.ndarray:
    """Outputs 1..count of a splitmix64 generator started at ``state``."""
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state) + k * np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class Tree(NamedTuple):
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: list[Tree]
    num_trees: int
    min_leaf: int
    max_depth: int | None
    seed: int
    n_features: int
    inbag: np.ndarray  # (num_trees, n_train) bootstrap counts
    _packed: tuple = field(default=None, repr=False)

    def packed(self):
        if self._packed is None:
            sizes = [t.feature.shape[0] for t in self.trees]
            offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(np.int64)
            arrays = tuple(np.ascontiguousarray(np.concatenate([getattr(t, f) for t in self.trees]))
                           for f in Tree._fields)
            object.__setattr__(self, "_packed", (*arrays, offsets))
        return self._packed


def forest_fit(features, target, num_trees: int = 200, min_leaf: int = 5,
               max_depth: int | None = None, seed: int = 0, bootstrap: bool = True,
               mtry: int | None = None) -> ForestModel:
    """Bagged regression trees with ``ceil(sqrt(q))`` split candidates per node.

    Tree ``t`` draws from a splitmix64 stream seeded by ``seed ^ t``, so the
    result does not depend on how trees are scheduled.
    """
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.ascontiguousarray(target, dtype=np.float64).reshape(-1)
    n, q = X.shape
    if q == 0:
        raise DataError("forest needs at least one feature")
    if y.shape[0] != n:
        raise DataError(f"features have {n} rows but target has {y.shape[0]}")
    if num_trees < 1 or min_leaf < 1:
        raise ConfigError("num_trees and min_leaf must be positive")
    if n < 2 * min_leaf:
        raise DataError(f"need at least {2 * min_leaf} rows for min_leaf={min_leaf}, got {n}")
    if mtry is None:
        mtry = math.ceil(math.sqrt(q))
    mtry = max(1, min(int(mtry), q))
    depth = -1 if max_depth is None else int(max_depth)

    trees = []
    inbag = np.zeros((num_trees, n), dtype=np.int32)
    for t in range(num_trees):
        state = _mix((int(seed) ^ t) & _M64)
        if bootstrap:
            rows = np.sort((_stream(state, n) % np.uint64(n)).astype(np.int64))
            state = (state + n * _GAMMA) & _M64
        else:
            rows = np.arange(n, dtype=np.int64)
        inbag[t] = np.bincount(rows, minlength=n)
        trees.append(Tree(*_kernels.build_tree(X, y, rows, mtry, min_leaf, depth, state)))
    return ForestModel(trees=trees, num_trees=num_trees, min_leaf=min_leaf, max_depth=max_depth,
                       seed=int(seed), n_features=q, inbag=inbag)


def _per_tree(model: ForestModel, features) -> np.ndarray:
    X = np.ascontiguousarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[1] != model.n_features:
        raise DataError(f"forest was trained on {model.n_features} features, got {X.shape[1]}")
    return _kernels.predict_trees(X, *model.packed())


def forest_predict(model: ForestModel, features) -> np.ndarray:
    return _per_tree(model, features).mean(axis=0)


def forest_oob_predict(model: ForestModel, features) -> np.ndarray:
    """Predict each training row using only trees that did not see it.

    Rows that were in every bootstrap sample get the full-forest prediction.
    """
    preds = _per_tree(model, features)
    if preds.shape[1] != model.inbag.shape[1]:
        raise DataError("out-of-bag prediction needs the training features")
    oob = model.inbag == 0
    counts = oob.sum(axis=0)
    sums = np.where(oob, preds, 0.0).sum(axis=0)
    full = preds.mean(axis=0)
    return np.where(counts > 0, sums / np.maximum(counts, 1), full)


def residualize(z, w, num_trees: int = 200, min_leaf: int = 5,
                max_depth: int | None = None, seed: int = 0) -> np.ndarray:
    """``z`` minus its out-of-bag forest regression on ``w``; ``z`` itself if w is empty."""
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim == 1:
        w = w.reshape(-1, 1)
    if w.shape[0] != z.shape[0]:
        raise DataError(f"z has {z.shape[0]} rows but w has {w.shape[0]}")
    if w.shape[1] == 0:
        return z
    model = forest_fit(w, z, num_trees=num_trees, min_leaf=min_leaf,
                       max_depth=max_depth, seed=seed)
    return z - forest_oob_predict(model, w)
