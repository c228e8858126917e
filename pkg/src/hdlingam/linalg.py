"""Dense linear algebra used across the pipeline: the data container,
row centering and ridge regression.

Conventions
-----------
Data matrices are stored ``p x n``: one row per variable, one column per
observation. Predictor blocks passed to the regressions follow the same
layout, so a design with ``k`` predictors is a ``k x n`` array and the
fitted values are ``X.T @ beta``.

Ridge is solved in the primal (``k x k`` normal equations) when
``k <= n`` and in the dual (``n x n`` Gram matrix) otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

RCOND_MIN = 1e-12


class SingularMatrixError(ValueError):
    """Raised when a normal matrix is numerically singular (use tau > 0)."""


class ConstantRowError(ValueError):
    """Raised when a variable has zero sample variance."""

    def __init__(self, var_id):
        super().__init__(f"variable {var_id!r} is constant")
        self.var_id = var_id


@dataclass(frozen=True)
class RidgeConfig:
    tau: float = 0.01

    def __post_init__(self):
        if not np.isfinite(self.tau) or self.tau < 0:
            raise ValueError(f"tau must be a finite nonnegative number, got {self.tau}")


@dataclass
class Dataset:
    """A ``p x n`` observation matrix with one label per row.

    Rows are variables and columns are samples. Construction validates
    that all entries are finite and that no row is constant.
    """

    values: np.ndarray
    var_ids: list = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[None, :]
        if values.ndim != 2:
            raise ValueError("values must be a 2-d array (variables x samples)")
        p, n = values.shape
        if p < 1 or n < 2:
            raise ValueError(f"need p >= 1 and n >= 2, got p={p}, n={n}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values contain NaN or infinite entries")
        if self.var_ids is None:
            self.var_ids = [f"x{i + 1}" for i in range(p)]
        self.var_ids = [str(v) for v in self.var_ids]
        if len(self.var_ids) != p:
            raise ValueError(f"got {len(self.var_ids)} var_ids for {p} rows")
        if len(set(self.var_ids)) != p:
            raise ValueError("var_ids must be unique")
        spread = values.max(axis=1) - values.min(axis=1)
        for i in np.flatnonzero(spread == 0):
            raise ConstantRowError(self.var_ids[i])
        self.values = values

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def subset(self, rows: Sequence[int]) -> "Dataset":
        rows = list(rows)
        return Dataset(self.values[rows], [self.var_ids[i] for i in rows])


def center_rows(data: Dataset) -> Dataset:
    """Subtract each row's sample mean."""
    values = data.values - data.values.mean(axis=1, keepdims=True)
    return Dataset(values, list(data.var_ids))


def center(a: np.ndarray) -> np.ndarray:
    """Row-center a plain array (vectors are treated as a single row)."""
    a = np.asarray(a, dtype=float)
    return a - a.mean(axis=-1, keepdims=True)


def _as_design(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros((0, n))
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != n:
        raise ValueError(f"design has {X.shape[1]} columns, response has {n}")
    return X


def _check_rcond(M: np.ndarray):
    eig = np.linalg.eigvalsh(M)
    top = eig[-1]
    if top <= 0 or eig[0] / top < RCOND_MIN:
        raise SingularMatrixError(
            "normal matrix is singular to working precision; use tau > 0"
        )


def _pd_solve(M: np.ndarray, rhs: np.ndarray, check: bool) -> np.ndarray:
    if check:
        _check_rcond(M)
    return scipy.linalg.solve(M, rhs, assume_a="pos", check_finite=False)


def ridge_fit(y, X, cfg: RidgeConfig = RidgeConfig()) -> np.ndarray:
    """Ridge coefficients of ``y`` on the rows of ``X``.

    Minimizes ``||y - X.T @ b||^2 + tau * ||b||^2``. With ``tau == 0`` this
    is ordinary least squares and requires ``X`` to have full row rank.

    Parameters
    ----------
    y : array of shape (n,)
    X : array of shape (k, n)
    cfg : RidgeConfig

    Returns
    -------
    beta : array of shape (k,)
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    X = _as_design(X, n)
    k = X.shape[0]
    if k == 0:
        return np.zeros(0)
    tau = cfg.tau
    check = tau == 0
    if k <= n:
        M = X @ X.T
        M[np.diag_indices(k)] += tau
        return _pd_solve(M, X @ y, check)
    if tau == 0:
        raise SingularMatrixError(
            f"{k} predictors and {n} observations need tau > 0"
        )
    G = X.T @ X
    G[np.diag_indices(n)] += tau
    return X @ _pd_solve(G, y, False)


def ridge_residual(y, X, cfg: RidgeConfig = RidgeConfig()) -> np.ndarray:
    """Residual ``y - X.T @ beta`` of the ridge fit of ``y`` on ``X``."""
    y = np.asarray(y, dtype=float)
    X = _as_design(X, y.shape[0])
    if X.shape[0] == 0:
        return y.copy()
    return y - X.T @ ridge_fit(y, X, cfg)


def ridge_residuals(Y, X, cfg: RidgeConfig = RidgeConfig()) -> np.ndarray:
    """Ridge residuals for every row of ``Y`` (m x n) on ``X`` (k x n).

    One factorization serves all responses. When ``tau > 0`` the residual
    operator is ``tau * (X.T X + tau I)^-1``, which avoids the cancellation
    in ``y - fitted`` when the fit is nearly exact.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n = Y.shape[1]
    X = _as_design(X, n)
    k = X.shape[0]
    if k == 0:
        return Y.copy()
    tau = cfg.tau
    if tau == 0:
        if k >= n:
            raise SingularMatrixError(
                f"{k} predictors and {n} observations need tau > 0"
            )
        M = X @ X.T
        beta = _pd_solve(M, X @ Y.T, True)
        return Y - beta.T @ X
    if k <= n:
        M = X @ X.T
        M[np.diag_indices(k)] += tau
        beta = _pd_solve(M, X @ Y.T, False)
        return Y - beta.T @ X
    G = X.T @ X
    G[np.diag_indices(n)] += tau
    return tau * _pd_solve(G, Y.T, False).T
