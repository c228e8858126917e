"""Direct and total causal effects given a causal order.

Direct effects regress each variable on its predecessors in the order;
total effects regress ``x_i`` on ``x_j`` plus the estimated parents of
``x_j`` (back-door adjustment). Both use the screening cascade: ISIS and
lasso when there are more candidates than ``n - 1``, then adaptive lasso.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .linalg import Dataset, RidgeConfig, center
from .ordering import CausalOrder
from .parallel import pmap
from .screening import isis
from .sparse import PATH_LEN, adaptive_lasso, lasso_bic

NONZERO = 1e-12


class CycleError(ValueError):
    """The effect matrix has a directed cycle."""


@dataclass
class DirectEffects:
    B: np.ndarray
    order: CausalOrder

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        check_acyclic_under(self.B, self.order)

    def parents(self, j: int) -> np.ndarray:
        return np.flatnonzero(np.abs(self.B[j]) > NONZERO)


@dataclass
class TotalEffects:
    A: np.ndarray


def check_acyclic_under(B, order: CausalOrder):
    """Raise unless ``B`` permuted by ``order`` is strictly lower triangular."""
    P = np.asarray(B)[np.ix_(order.order, order.order)]
    if np.any(np.abs(np.triu(P)) > 0):
        raise CycleError("effect matrix is not strictly lower triangular under the order")


def topological_order(B) -> CausalOrder:
    """A causal order for an acyclic ``B`` (``B[i, j] != 0`` means j -> i).

    Among ready variables the lowest index goes first.
    """
    B = np.asarray(B)
    p = B.shape[0]
    adj = np.abs(B) > 0
    np.fill_diagonal(adj, False)
    indeg = adj.sum(axis=1)
    done = np.zeros(p, dtype=bool)
    order = []
    for _ in range(p):
        ready = np.flatnonzero((indeg == 0) & ~done)
        if ready.size == 0:
            raise CycleError("effect matrix contains a directed cycle")
        v = int(ready[0])
        order.append(v)
        done[v] = True
        indeg -= adj[:, v]
    if np.any(np.diag(np.asarray(B)) != 0):
        raise CycleError("nonzero diagonal (self-loop)")
    return CausalOrder(order)


def regress_cascade(y, X, cfg: RidgeConfig = RidgeConfig(),
                    path_len: int = PATH_LEN) -> np.ndarray:
    """ISIS -> lasso -> adaptive lasso, returning one coefficient per row of X."""
    y = center(y)
    X = center(np.asarray(X, dtype=float).reshape(-1, y.shape[0]))
    k, n = X.shape
    coef = np.zeros(k)
    if k == 0:
        return coef
    idx = np.arange(k)
    if k > n - 1:
        idx = np.array(isis(y, X, n - 1, cfg, path_len).selected, dtype=int)
        if idx.size == 0:
            return coef
        lasso = lasso_bic(y, X[idx], path_len=path_len)
        idx = idx[np.abs(lasso) > 0]
        if idx.size == 0:
            return coef
    coef[idx] = adaptive_lasso(y, X[idx], cfg, path_len)
    return coef


def estimate_direct(data: Dataset, order: CausalOrder,
                    cfg: RidgeConfig = RidgeConfig(), jobs: int = 1,
                    path_len: int = PATH_LEN) -> DirectEffects:
    """Row ``i`` of B from the cascade of ``x_i`` on its predecessors."""
    X = center(data.values)
    rank = order.rank
    rows = [i for i in range(data.p) if rank[i] > 0]
    tasks = [(X[i], X[order.predecessors(i)], cfg, path_len) for i in rows]
    results = pmap(_cascade_task, tasks, jobs)
    B = np.zeros((data.p, data.p))
    for i, coef in zip(rows, results):
        B[i, order.predecessors(i)] = coef
    return DirectEffects(B, order)


def _cascade_task(args):
    return regress_cascade(*args)


def total_from_direct(direct) -> TotalEffects:
    """``A = (I - B)^-1`` with the diagonal zeroed.

    Accepts a :class:`DirectEffects` or a bare matrix (ordered topologically).
    """
    if isinstance(direct, DirectEffects):
        B, order = direct.B, direct.order
    else:
        B = np.asarray(direct, dtype=float)
        order = topological_order(B)
    p = B.shape[0]
    perm = order.order
    L = np.eye(p) - B[np.ix_(perm, perm)]
    inv = scipy.linalg.solve_triangular(L, np.eye(p), lower=True, unit_diagonal=True)
    A = np.empty_like(inv)
    A[np.ix_(perm, perm)] = inv
    np.fill_diagonal(A, 0.0)
    return TotalEffects(A)


def estimate_total(data: Dataset, direct: DirectEffects,
                   cfg: RidgeConfig = RidgeConfig(), jobs: int = 1,
                   path_len: int = PATH_LEN) -> TotalEffects:
    """Back-door estimates of every total effect along the causal order.

    ``a_ij`` is the coefficient of ``x_j`` when ``x_i`` is regressed on
    ``x_j`` and the parents of ``x_j``. Pairs where ``j`` does not precede
    ``i`` are structural zeros.
    """
    X = center(data.values)
    rank = direct.order.rank
    p = data.p
    pairs, tasks = [], []
    for j in range(p):
        adjust = [j] + [int(q) for q in direct.parents(j)]
        for i in range(p):
            if rank[j] < rank[i]:
                pairs.append((i, j))
                tasks.append((X[i], X[adjust], cfg, path_len))
    results = pmap(_cascade_task, tasks, jobs)
    A = np.zeros((p, p))
    for (i, j), coef in zip(pairs, results):
        A[i, j] = coef[0]
    return TotalEffects(A)
