"""Causal-order search for the high-dimensional direct method.

At every step the remaining variables are ridge-regressed on the ones
already ordered, and the candidate whose residual is most independent of
the other variables' residuals (conditioned additionally on the candidate)
is appended. Independence is measured by tanh-based nonlinear correlation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import Dataset, RidgeConfig, center, ridge_residuals

log = logging.getLogger(__name__)

VAR_FLOOR = 1e-12
_CHUNK_FLOATS = 4_000_000


@dataclass
class CausalOrder:
    order: np.ndarray

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=int)
        p = len(self.order)
        if not np.array_equal(np.sort(self.order), np.arange(p)):
            raise ValueError(f"not a permutation of 0..{p - 1}: {self.order.tolist()}")

    def __len__(self):
        return len(self.order)

    @property
    def rank(self) -> np.ndarray:
        """rank[i] = position of variable i in the order."""
        rank = np.empty(len(self.order), dtype=int)
        rank[self.order] = np.arange(len(self.order))
        return rank

    def predecessors(self, i: int) -> np.ndarray:
        return self.order[: self.rank[i]]


def _standardize(a):
    """Center along the last axis and scale to unit norm.

    Rows with variance below VAR_FLOOR come back as zeros, so every
    correlation they enter is 0.
    """
    a = center(a)
    ss = (a * a).sum(axis=-1, keepdims=True)
    var = ss / a.shape[-1]
    ok = var >= VAR_FLOOR
    return np.where(ok, a / np.sqrt(np.where(ok, ss, 1.0)), 0.0), ok


def independence_score(candidate, others) -> float:
    """Sum over ``others`` of |corr(tanh(c), r)| + |corr(c, tanh(r))|.

    Lower means more independent. Degenerate (near-constant) vectors
    contribute zero.
    """
    c = center(np.asarray(candidate, dtype=float))
    R = np.asarray(others, dtype=float)
    if R.size == 0:
        return 0.0
    R = center(np.atleast_2d(R))
    c_std, c_ok = _standardize(c)
    if not c_ok:
        return 0.0
    gc_std, _ = _standardize(np.tanh(c))
    r_std, _ = _standardize(R)
    gr_std, _ = _standardize(np.tanh(R))
    return float(np.abs(r_std @ gc_std).sum() + np.abs(gr_std @ c_std).sum())


def candidate_scores(X_U: np.ndarray, X_K: np.ndarray, cfg: RidgeConfig) -> np.ndarray:
    """Independence score of every row of ``X_U`` given the ordered block ``X_K``.

    Residuals on ``[x_j, x_K]`` are obtained from those on ``x_K`` alone by a
    rank-one update: with ``t_i`` the residual of ``x_i`` on ``x_K``,

        r_i^(j) = t_i - (t_i . x_j) / (tau + t_j . x_j) * t_j

    which is exact for ridge (and for least squares when ``tau == 0``).
    """
    m, n = X_U.shape
    T = ridge_residuals(X_U, X_K, cfg)
    C = T @ X_U.T                       # C[i, j] = t_i . x_j
    denom = cfg.tau + np.diag(C)
    safe = denom > np.finfo(float).tiny
    coef = np.where(safe[None, :], C / np.where(safe, denom, 1.0)[None, :], 0.0)

    T = center(T)
    t_std, t_ok = _standardize(T)
    gt_std, _ = _standardize(np.tanh(T))

    scores = np.zeros(m)
    off = ~np.eye(m, dtype=bool)
    chunk = max(1, _CHUNK_FLOATS // max(1, m * n))
    for lo in range(0, m, chunk):
        js = np.arange(lo, min(m, lo + chunk))
        # R[a, i, :] = residual of x_i on [x_j, x_K] for j = js[a]
        R = T[None, :, :] - coef[:, js].T[:, :, None] * T[js][:, None, :]
        r_std, _ = _standardize(R)
        gr_std, _ = _standardize(np.tanh(R))
        s1 = np.abs(np.einsum("ain,an->ai", r_std, gt_std[js]))
        s2 = np.abs(np.einsum("ain,an->ai", gr_std, t_std[js]))
        scores[js] = ((s1 + s2) * off[js]).sum(axis=1)
    if not t_ok.all():
        log.debug("degenerate residuals for %d candidates", int((~t_ok).sum()))
    return scores


def find_exogenous(data: Dataset, K, cfg: RidgeConfig = RidgeConfig()) -> int:
    """Index of the most exogenous variable among those not in ``K``."""
    X = center(data.values)
    K = list(K)
    if len(K) >= data.p - 1:
        raise ValueError("need at least two unordered variables")
    U = np.array([i for i in range(data.p) if i not in set(K)])
    scores = candidate_scores(X[U], X[K], cfg)
    return int(U[np.argmin(scores)])  # argmin picks the lowest index on ties


def estimate_order(data: Dataset, cfg: RidgeConfig = RidgeConfig()) -> CausalOrder:
    """Full causal ordering by repeated exogenous-variable search."""
    X = center(data.values)
    p = data.p
    K: list[int] = []
    U = list(range(p))
    while len(K) < p - 1:
        Ua = np.array(U)
        scores = candidate_scores(X[Ua], X[K], cfg)
        m = int(Ua[np.argmin(scores)])
        K.append(m)
        U.remove(m)
    K.extend(U)
    return CausalOrder(K)
