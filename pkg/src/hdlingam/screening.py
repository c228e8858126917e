"""Iterative sure independence screening (ISIS).

Each round ranks the not-yet-kept predictors by absolute correlation with
the current residual, adds the top ``floor(n / ln n)`` of them to the kept
set, runs a BIC lasso on the union and keeps the survivors. The response
is then residualized on the survivors and the next round starts. Screening
stops once the union reaches ``target_dim``, when a round adds nothing new,
when the residual vanishes, or after ``MAX_ROUNDS`` rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import RidgeConfig, ridge_residual
from .sparse import PATH_LEN, lasso_bic

MAX_ROUNDS = 10


@dataclass
class ScreenResult:
    selected: list
    per_round: list = field(default_factory=list)


def round_size(n: int) -> int:
    return max(1, int(np.floor(n / np.log(n)))) if n > 1 else 1


def abs_correlations(y, X) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    yc = y - y.mean()
    Xc = X - X.mean(axis=1, keepdims=True)
    denom = np.sqrt((Xc * Xc).sum(axis=1) * (yc @ yc))
    out = np.zeros(X.shape[0])
    ok = denom > 0
    out[ok] = np.abs(Xc[ok] @ yc) / denom[ok]
    return out


def sis_round(y, X, count: int) -> list:
    """Indices of the ``count`` rows of ``X`` most correlated with ``y``.

    Ties are broken toward the lower index.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    corr = abs_correlations(y, X)
    rank = np.argsort(-corr, kind="stable")
    return [int(i) for i in rank[:count]]


def isis(y, X, target_dim: int, cfg: RidgeConfig = RidgeConfig(),
         path_len: int = PATH_LEN) -> ScreenResult:
    """Screen the rows of ``X`` down to at most ``target_dim`` predictors."""
    y = np.asarray(y, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    k, n = X.shape
    if target_dim > n - 1:
        raise ValueError(f"target_dim must be at most n - 1 = {n - 1}")
    if k <= target_dim:
        return ScreenResult(list(range(k)))

    d = round_size(n)
    kept: list[int] = []
    per_round = []
    resid = y
    for _ in range(MAX_ROUNDS):
        pool = np.array([i for i in range(k) if i not in set(kept)])
        if pool.size == 0:
            break
        new = [int(pool[i]) for i in sis_round(resid, X[pool], min(d, pool.size))]
        union = kept + new
        coef = lasso_bic(y, X[union], path_len=path_len)
        survivors = [union[t] for t in np.flatnonzero(coef)]
        per_round.append((new, survivors))
        if len(union) >= target_dim:
            return ScreenResult(_truncate(survivors, new, union, target_dim), per_round)
        if set(survivors) == set(kept):
            break
        kept = survivors
        resid = ridge_residual(y, X[kept], cfg)
        if np.linalg.norm(resid) < 1e-12:
            break
    return ScreenResult(kept, per_round)


def _truncate(survivors, new, union, target_dim):
    # survivors carry lasso evidence; fill the rest by this round's rank
    order = list(survivors)
    order += [i for i in new if i not in order]
    order += [i for i in union if i not in order]
    return order[:target_dim]
