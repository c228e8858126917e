"""Comparison methods: lasso / elastic net on all other variables, and a
random acyclic guess matched to LiNGAM's number of nonzero effects."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import Dataset, center
from .parallel import pmap
from .sparse import PATH_LEN, lasso_bic

log = logging.getLogger(__name__)

NONZERO = 1e-12


@dataclass
class BaselineEstimate:
    method: str
    B_hat: np.ndarray
    A_hat: np.ndarray


def _row_task(args):
    y, X, ridge_share, path_len = args
    return lasso_bic(y, X, ridge_share, path_len=path_len)


def lasso_baseline(data: Dataset, ridge_share: float = 0.0, jobs: int = 1,
                   path_len: int = PATH_LEN) -> BaselineEstimate:
    """Regress every variable on all the others with a BIC-tuned (elastic-net) lasso.

    The same matrix serves as the direct and the total effect estimate.
    """
    X = center(data.values)
    p = data.p
    others = [np.array([j for j in range(p) if j != i], dtype=int) for i in range(p)]
    coefs = pmap(_row_task, [(X[i], X[others[i]], ridge_share, path_len) for i in range(p)], jobs)
    B = np.zeros((p, p))
    for i, c in enumerate(coefs):
        B[i, others[i]] = c
    method = "lasso" if ridge_share == 0 else "enet"
    return BaselineEstimate(method, B, B.copy())


def _random_triangle(p: int, count: int, order, rng) -> np.ndarray:
    rows, cols = np.tril_indices(p, -1)
    capacity = rows.size
    if count > capacity:
        log.warning("requested %d nonzeros but only %d fit acyclically; capping", count, capacity)
        count = capacity
    pick = rng.choice(capacity, size=count, replace=False)
    M = np.zeros((p, p))
    # position (a, b) with a > b in the sampled order: order[b] -> order[a]
    M[order[rows[pick]], order[cols[pick]]] = 1.0
    return M


def random_guess(B_ref, A_ref, rng) -> BaselineEstimate:
    """Random acyclic estimate with as many nonzeros as the reference.

    One random order is drawn; B and A nonzeros are placed independently
    among the cells consistent with it.
    """
    B_ref = np.asarray(B_ref)
    A_ref = np.asarray(A_ref)
    p = B_ref.shape[0]
    off = ~np.eye(p, dtype=bool)
    nb = int(np.count_nonzero((np.abs(B_ref) > NONZERO) & off))
    na = int(np.count_nonzero((np.abs(A_ref) > NONZERO) & off))
    order = rng.permutation(p)
    B = _random_triangle(p, nb, order, rng)
    A = _random_triangle(p, na, order, rng)
    return BaselineEstimate("random", B, A)
