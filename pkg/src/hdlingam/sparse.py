"""Weighted lasso, adaptive lasso and elastic net by coordinate descent.

The solver minimizes, for a centered response ``y`` and centered
predictors ``X`` (``k x n``)::

    1/(2n) ||y - X.T b||^2 + lam * sum_j w_j [(1 - a) |g_j| + a g_j^2]

where ``a`` is the ridge share and ``g_j = s_j b_j`` are the coefficients
of the predictors rescaled to unit sample variance (``s_j`` is the sample
standard deviation of row ``j``). Coefficients are always returned on the
original scale. Regularization paths run from ``lambda_max`` down to
``1e-3 * lambda_max`` on a log grid and are scored with the Gaussian BIC
``n log(RSS/n) + df log(n)``.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .linalg import RidgeConfig, ridge_fit

PATH_LEN = 100
LAMBDA_RATIO = 1e-3
TOL = 1e-7
KKT_TOL = 1e-7
MAX_SWEEPS = 100_000
WEIGHT_FLOOR = 1e-12


class ConvergenceError(RuntimeError):
    """Coordinate descent hit the sweep limit.

    ``coef`` holds the last iterate (original scale).
    """

    def __init__(self, msg, coef, n_sweeps):
        super().__init__(msg)
        self.coef = coef
        self.n_sweeps = n_sweeps
        self.converged = False


@dataclass
class LassoProblem:
    y: np.ndarray
    X: np.ndarray
    weights: np.ndarray = None
    ridge_share: float = 0.0

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        n = self.y.shape[0]
        if X.size == 0:
            X = np.zeros((0, n))
        elif X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != n:
            raise ValueError(f"X has {X.shape[1]} columns, y has length {n}")
        self.X = X
        if self.weights is None:
            self.weights = np.ones(X.shape[0])
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (X.shape[0],):
            raise ValueError("need one weight per predictor")
        if not (np.all(np.isfinite(self.weights)) and np.all(self.weights > 0)):
            raise ValueError("weights must be finite and positive")
        if not 0.0 <= self.ridge_share <= 1.0:
            raise ValueError("ridge_share must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[0]


@dataclass
class RegPath:
    lambdas: np.ndarray
    coefs: np.ndarray  # (path_len, k), original scale
    bic: np.ndarray
    rss: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.lambdas)


# -- KKT monitoring ---------------------------------------------------------

class KKTMonitor:
    """Collects the scaled KKT residual of every solve while active."""

    def __init__(self):
        self.worst = 0.0
        self.calls = 0

    def record(self, value):
        self.calls += 1
        if value > self.worst:
            self.worst = value


_monitors: list[KKTMonitor] = []


@contextlib.contextmanager
def kkt_monitor():
    mon = KKTMonitor()
    _monitors.append(mon)
    try:
        yield mon
    finally:
        _monitors.remove(mon)


# -- kernel -----------------------------------------------------------------

@njit(cache=True)
def _kkt(Z, r, gamma, l1, l2):
    k, n = Z.shape
    worst = 0.0
    for j in range(k):
        g = 0.0
        for t in range(n):
            g += Z[j, t] * r[t]
        g /= n
        if gamma[j] != 0.0:
            s = 1.0 if gamma[j] > 0 else -1.0
            v = abs(g - l1[j] * s - 2.0 * l2[j] * gamma[j])
        else:
            v = abs(g) - l1[j]
            if v < 0.0:
                v = 0.0
        if v > worst:
            worst = v
    return worst


@njit(cache=True)
def _active_solve(Z, y, gamma, l1, l2):
    """Exact minimizer on the current active set and sign pattern.

    If the minimizer flips a sign, gamma moves toward it only until the first
    coefficient reaches zero, which is dropped. A singular pure-lasso system
    also drops one coefficient, sliding along its null vector. Returns 0 when
    gamma is untouched, 1 after a full solve and 2 after a drop.
    """
    k, n = Z.shape
    m = 0
    for j in range(k):
        if gamma[j] != 0.0:
            m += 1
    if m == 0:
        return 0
    idx = np.empty(m, dtype=np.int64)
    m = 0
    for j in range(k):
        if gamma[j] != 0.0:
            idx[m] = j
            m += 1
    M = np.empty((m, m))
    b = np.empty(m)
    for a in range(m):
        ja = idx[a]
        for c in range(a, m):
            jc = idx[c]
            v = 0.0
            for t in range(n):
                v += Z[ja, t] * Z[jc, t]
            M[a, c] = v / n
            M[c, a] = v / n
        M[a, a] += 2.0 * l2[ja]
        v = 0.0
        for t in range(n):
            v += Z[ja, t] * y[t]
        s = 1.0 if gamma[ja] > 0 else -1.0
        b[a] = v / n - l1[ja] * s
    ev, vec = np.linalg.eigh(M)
    if ev[0] <= 1e-10 * ev[m - 1]:
        if l2[idx[0]] > 0.0:
            return 0
        # Rank-deficient lasso face: the fit is flat along the null vector, so
        # slide along it (never raising the l1 term) until one coefficient
        # hits zero. This leaves a solution with a smaller active set.
        v = vec[:, 0]
        slope = 0.0
        for a in range(m):
            s = 1.0 if gamma[idx[a]] > 0 else -1.0
            slope += l1[idx[a]] * s * v[a]
        if slope > 0.0:
            v = -v
        step = np.inf
        hit = -1
        for a in range(m):
            if gamma[idx[a]] * v[a] < 0.0:
                t = -gamma[idx[a]] / v[a]
                if t < step:
                    step = t
                    hit = a
        if hit < 0:
            return 0
        for a in range(m):
            gamma[idx[a]] += step * v[a]
        gamma[idx[hit]] = 0.0
        return 2
    sol = np.linalg.solve(M, b)
    # The objective is a convex quadratic on the sign-fixed face, so moving
    # toward its minimizer descends; stop where the first coefficient hits zero.
    step = 1.0
    hit = -1
    for a in range(m):
        g = gamma[idx[a]]
        if sol[a] * g <= 0.0:
            t = g / (g - sol[a])
            if t < step:
                step = t
                hit = a
    if hit < 0:
        for a in range(m):
            gamma[idx[a]] = sol[a]
        return 1
    for a in range(m):
        gamma[idx[a]] += step * (sol[a] - gamma[idx[a]])
    gamma[idx[hit]] = 0.0
    return 2


@njit(cache=True)
def _cd_kernel(Z, y, r, gamma, l1, l2, tol, kkt_tol, max_sweeps):
    # Z rows have unit sample variance; r = y - Z.T gamma on entry and exit.
    k, n = Z.shape
    prev = np.zeros(k, dtype=np.int8)
    cur = np.zeros(k, dtype=np.int8)
    tried = False
    for sweep in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(k):
            g = 0.0
            for t in range(n):
                g += Z[j, t] * r[t]
            g = g / n + gamma[j]
            if g > l1[j]:
                new = (g - l1[j]) / (1.0 + 2.0 * l2[j])
            elif g < -l1[j]:
                new = (g + l1[j]) / (1.0 + 2.0 * l2[j])
            else:
                new = 0.0
            delta = new - gamma[j]
            if delta != 0.0:
                for t in range(n):
                    r[t] -= delta * Z[j, t]
                gamma[j] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        if max_delta < tol and _kkt(Z, r, gamma, l1, l2) <= kkt_tol:
            return sweep, True
        same = True
        for j in range(k):
            cur[j] = 1 if gamma[j] > 0 else (-1 if gamma[j] < 0 else 0)
            if cur[j] != prev[j]:
                same = False
            prev[j] = cur[j]
        if not same:
            tried = False
        elif not tried:
            # the next sweep may re-add a dropped coefficient, so allow a retry
            status = _active_solve(Z, y, gamma, l1, l2)
            tried = status != 2
            if status:
                for t in range(n):
                    v = y[t]
                    for j in range(k):
                        if gamma[j] != 0.0:
                            v -= Z[j, t] * gamma[j]
                    r[t] = v
    return max_sweeps, False


@njit(cache=True)
def _path_kernel(Z, y, w, ridge_share, lambdas, tol, kkt_tol, max_sweeps):
    """Warm-started solves along ``lambdas``.

    Returns (gammas, rss, kkt, failed_at); ``failed_at`` is -1 on success,
    otherwise the index of the first penalty that did not converge.
    """
    k, n = Z.shape
    L = lambdas.shape[0]
    gammas = np.zeros((L, k))
    rss = np.empty(L)
    kkt = np.zeros(L)
    gamma = np.zeros(k)
    r = y.copy()
    fresh = np.empty(n)
    for t in range(L):
        l1 = lambdas[t] * (1.0 - ridge_share) * w
        l2 = lambdas[t] * ridge_share * w
        ok = True
        if t > 0:  # the solution at lambda_max is zero by construction
            _, ok = _cd_kernel(Z, y, r, gamma, l1, l2, tol, kkt_tol, max_sweeps)
        for s in range(n):
            v = y[s]
            for j in range(k):
                if gamma[j] != 0.0:
                    v -= Z[j, s] * gamma[j]
            fresh[s] = v
        kkt[t] = _kkt(Z, fresh, gamma, l1, l2)
        ss = 0.0
        for s in range(n):
            ss += fresh[s] * fresh[s]
        rss[t] = ss
        gammas[t] = gamma
        if not ok:
            return gammas, rss, kkt, t
    return gammas, rss, kkt, -1


# -- problem preparation ----------------------------------------------------

@dataclass
class _Prepared:
    Z: np.ndarray       # standardized active predictors
    scale: np.ndarray   # their standard deviations
    active: np.ndarray  # indices into the original predictor list
    w: np.ndarray
    y_rms: float
    n: int
    k: int


def _prepare(problem: LassoProblem) -> _Prepared:
    X, n = problem.X, problem.n
    sd = np.sqrt((X * X).sum(axis=1) / n) if problem.k else np.zeros(0)
    active = np.flatnonzero(sd > 0)
    Z = np.ascontiguousarray(X[active] / sd[active, None])
    y_rms = float(np.sqrt(problem.y @ problem.y / n))
    return _Prepared(Z, sd[active], active, problem.weights[active], y_rms, n, problem.k)


def _lambda_max(prep: _Prepared, y, ridge_share) -> float:
    if ridge_share >= 1.0:
        raise ValueError("lambda_max is undefined without an l1 component")
    floor = np.finfo(float).eps * max(prep.y_rms, 1.0)
    if prep.Z.shape[0] == 0:
        return floor
    grad = np.abs(prep.Z @ y) / prep.n
    lam = float(np.max(grad / ((1.0 - ridge_share) * prep.w)))
    return max(lam, floor)


def _solve(prep: _Prepared, y, lam, ridge_share, gamma0, tol, max_sweeps):
    """Run the kernel from a standardized warm start; returns (gamma, r, sweeps)."""
    gamma = np.array(gamma0, dtype=float)
    r = y - prep.Z.T @ gamma if prep.Z.shape[0] else y.copy()
    l1 = lam * (1.0 - ridge_share) * prep.w
    l2 = lam * ridge_share * prep.w
    scale = max(prep.y_rms, np.finfo(float).tiny)
    sweeps, ok = _cd_kernel(prep.Z, y, r, gamma, l1, l2, tol * scale, KKT_TOL * scale, max_sweeps)
    if _monitors and ok:
        # recompute from scratch so drift in the running residual is caught too
        r_fresh = y - prep.Z.T @ gamma if prep.Z.shape[0] else y
        worst = _kkt(prep.Z, np.ascontiguousarray(r_fresh), gamma, l1, l2) / scale
        for mon in _monitors:
            mon.record(worst)
    if not ok:
        raise ConvergenceError(
            f"no convergence after {sweeps} sweeps at lambda={lam:g}",
            _unscale(prep, gamma), sweeps,
        )
    return gamma, r, sweeps


def _unscale(prep: _Prepared, gamma) -> np.ndarray:
    coef = np.zeros(prep.k)
    coef[prep.active] = gamma / prep.scale
    return coef


# -- public operations ------------------------------------------------------

def lambda_max(problem: LassoProblem) -> float:
    """Smallest penalty at which every coefficient is zero."""
    prep = _prepare(problem)
    return _lambda_max(prep, problem.y, problem.ridge_share)


def objective(problem: LassoProblem, coef, lam: float) -> float:
    """Penalized objective at original-scale coefficients ``coef``."""
    coef = np.asarray(coef, dtype=float)
    n = problem.n
    r = problem.y - problem.X.T @ coef if problem.k else problem.y
    sd = np.sqrt((problem.X * problem.X).sum(axis=1) / n)
    g = coef * sd
    a = problem.ridge_share
    pen = np.sum(problem.weights * ((1 - a) * np.abs(g) + a * g * g))
    return float(r @ r / (2 * n) + lam * pen)


def coordinate_descent(problem: LassoProblem, lam: float, warm_start=None,
                       tol: float = TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Minimize the penalized least-squares objective at a single ``lam``.

    ``warm_start`` is an original-scale coefficient vector. Raises
    :class:`ConvergenceError` (carrying the last iterate) if ``max_sweeps``
    is exhausted.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    prep = _prepare(problem)
    gamma0 = np.zeros(len(prep.active))
    if warm_start is not None:
        gamma0 = np.asarray(warm_start, dtype=float)[prep.active] * prep.scale
    gamma, _, _ = _solve(prep, problem.y, lam, problem.ridge_share, gamma0, tol, max_sweeps)
    return _unscale(prep, gamma)


def bic(rss, df, n: int, y_ss: float = 1.0):
    """Gaussian BIC ``n log(RSS/n) + df log(n)``; vectorizes over arrays."""
    # floor keeps log finite for exact fits
    floor = max(1e-300, np.finfo(float).eps ** 2 * y_ss)
    rss = np.maximum(rss, floor)
    return n * np.log(rss / n) + np.asarray(df) * np.log(n)


def fit_path(problem: LassoProblem, path_len: int = PATH_LEN) -> RegPath:
    """Warm-started solutions over a log-spaced grid from ``lambda_max``."""
    if path_len < 2:
        raise ValueError("path_len must be at least 2")
    prep = _prepare(problem)
    y, n = problem.y, problem.n
    lam_max = _lambda_max(prep, y, problem.ridge_share)
    lambdas = lam_max * np.logspace(0, np.log10(LAMBDA_RATIO), path_len)
    scale = max(prep.y_rms, np.finfo(float).tiny)
    gammas, rss, kkt, failed = _path_kernel(
        prep.Z, y, prep.w, float(problem.ridge_share), lambdas,
        TOL * scale, KKT_TOL * scale, MAX_SWEEPS,
    )
    for mon in _monitors:
        for v in kkt[: path_len if failed < 0 else failed]:
            mon.record(v / scale)
    coefs = np.zeros((path_len, problem.k))
    coefs[:, prep.active] = gammas / prep.scale
    if failed >= 0:
        raise ConvergenceError(
            f"no convergence after {MAX_SWEEPS} sweeps at lambda={lambdas[failed]:g}",
            coefs[failed], MAX_SWEEPS,
        )
    df = np.count_nonzero(gammas, axis=1)
    return RegPath(lambdas, coefs, bic(rss, df, n, float(y @ y)), rss)


def select_bic(path: RegPath):
    """Return ``(lambda, coef)`` at the BIC minimum.

    Ties go to the larger penalty, which comes first on the path.
    """
    if len(path) == 0:
        raise ValueError("empty path")
    best = int(np.argmin(path.bic))  # first occurrence = largest lambda
    return float(path.lambdas[best]), path.coefs[best].copy()


def lasso_bic(y, X, ridge_share: float = 0.0, weights=None,
              path_len: int = PATH_LEN) -> np.ndarray:
    """BIC-selected (elastic-net) lasso coefficients of ``y`` on ``X``."""
    problem = LassoProblem(y, X, weights, ridge_share)
    if problem.k == 0:
        return np.zeros(0)
    return select_bic(fit_path(problem, path_len))[1]


def adaptive_lasso(y, X, cfg: RidgeConfig = RidgeConfig(),
                   path_len: int = PATH_LEN) -> np.ndarray:
    """Adaptive lasso with ridge pilot weights and BIC selection.

    Weights are ``1/|b_ridge|``. Predictors whose pilot coefficient is
    below ``1e-12`` in magnitude get an infinite weight, i.e. they are
    dropped and their coefficient is zero. Expects at most ``n - 1``
    predictors; screen first otherwise.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    X = np.asarray(X, dtype=float).reshape(-1, n)
    k = X.shape[0]
    coef = np.zeros(k)
    if k == 0:
        return coef
    if k > n - 1:
        raise ValueError(f"adaptive_lasso needs k <= n - 1, got k={k}, n={n}")
    pilot = ridge_fit(y, X, cfg)
    sd = np.sqrt((X * X).sum(axis=1) / n)
    keep = np.flatnonzero((np.abs(pilot) >= WEIGHT_FLOOR) & (sd > 0))
    if keep.size == 0:
        return coef
    # the solver penalizes standardized coefficients, so 1/|b_j| becomes 1/|s_j b_j|
    w = 1.0 / (np.abs(pilot[keep]) * sd[keep])
    coef[keep] = lasso_bic(y, X[keep], 0.0, w, path_len)
    return coef
