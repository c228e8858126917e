"""Benchmark harness: synthetic trials, accuracy/coverage scoring and
median summaries for LiNGAM and the baselines."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .baselines import lasso_baseline, random_guess
from .datagen import GeneratorConfig, make_rng, synthesize
from .linalg import RidgeConfig, center_rows
from .parallel import pmap
from .pipeline import fit_lingam
from .sparse import PATH_LEN

METHODS = ("random", "lasso", "enet", "lingam")
TARGETS = ("direct", "total")
NONZERO = 1e-12


@dataclass
class MetricsRecord:
    trial: int
    method: str
    target: str
    accuracy: float | None
    coverage: float | None
    seconds: float | None = None
    status: str = "ok"


def score(estimate, truth):
    """(accuracy, coverage) of the nonzero pattern, diagonal ignored.

    Accuracy is the share of estimated nonzeros that are true; coverage is
    the share of true nonzeros that were estimated. Either is None when its
    denominator is empty.
    """
    est = np.abs(np.asarray(estimate)) > NONZERO
    tru = np.abs(np.asarray(truth)) > NONZERO
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {tru.shape}")
    off = ~np.eye(est.shape[0], dtype=bool)
    est &= off
    tru &= off
    hit = int(np.count_nonzero(est & tru))
    n_est = int(np.count_nonzero(est))
    n_tru = int(np.count_nonzero(tru))
    accuracy = hit / n_est if n_est else None
    coverage = hit / n_tru if n_tru else None
    return accuracy, coverage


def _records(trial, method, B_hat, A_hat, truth, seconds):
    out = []
    for target, est, ref in (("direct", B_hat, truth.B_true), ("total", A_hat, truth.A_true)):
        acc, cov = score(est, ref)
        out.append(MetricsRecord(trial, method, target, acc, cov, seconds))
    return out


def _failed(trial, method):
    return [MetricsRecord(trial, method, t, None, None, None, "failed") for t in TARGETS]


def run_trial(args) -> list[MetricsRecord]:
    """All requested methods on one synthetic dataset."""
    cfg, methods, tau, trial, timing, path_len = args
    data, truth = synthesize(cfg, stream=trial)
    data = center_rows(data)
    ridge = RidgeConfig(tau)
    records = []
    fit = None
    lingam_secs = None

    def clock(start):
        return time.perf_counter() - start if timing else None

    if "lingam" in methods or "random" in methods:
        start = time.perf_counter()
        try:
            fit = fit_lingam(data, ridge, path_len=path_len)
            lingam_secs = clock(start)
        except Exception:
            fit = None
    for method in METHODS:
        if method not in methods:
            continue
        if method == "lingam":
            if fit is None:
                records += _failed(trial, method)
            else:
                records += _records(trial, method, fit.direct.B, fit.total.A, truth, lingam_secs)
        elif method == "random":
            if fit is None:
                records += _failed(trial, method)
                continue
            start = time.perf_counter()
            est = random_guess(fit.direct.B, fit.total.A, make_rng(cfg.seed, trial, 1))
            records += _records(trial, method, est.B_hat, est.A_hat, truth, clock(start))
        else:
            start = time.perf_counter()
            try:
                est = lasso_baseline(data, 0.0 if method == "lasso" else 0.5,
                                     path_len=path_len)
            except Exception:
                records += _failed(trial, method)
                continue
            records += _records(trial, method, est.B_hat, est.A_hat, truth, clock(start))
    return records


def _box(values):
    if not values:
        return {"median": None, "q1": None, "q3": None, "min": None, "max": None,
                "whisker_low": None, "whisker_high": None}
    v = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    inside = v[(v >= q1 - 1.5 * iqr) & (v <= q3 + 1.5 * iqr)]
    return {"median": float(med), "q1": float(q1), "q3": float(q3),
            "min": float(v[0]), "max": float(v[-1]),
            "whisker_low": float(inside[0]), "whisker_high": float(inside[-1])}


def summarize(records: list[MetricsRecord], methods=METHODS, timing: bool = False) -> dict:
    """Per method and target: box-plot statistics over defined values."""
    out = {}
    for method in [m for m in METHODS if m in methods]:
        out[method] = {}
        for target in TARGETS:
            rows = [r for r in records if r.method == method and r.target == target]
            ok = [r for r in rows if r.status == "ok"]
            entry = {"trials": len(rows), "failed": len(rows) - len(ok)}
            for metric in ("accuracy", "coverage"):
                vals = [getattr(r, metric) for r in ok if getattr(r, metric) is not None]
                entry[metric] = _box(vals)
                entry[metric]["defined"] = len(vals)
                entry[metric]["undefined"] = len(ok) - len(vals)
            if timing:
                secs = [r.seconds for r in ok if r.seconds is not None]
                entry["median_seconds"] = float(np.median(secs)) if secs else None
            out[method][target] = entry
    return out


def run_trials(cfg: GeneratorConfig, methods=METHODS, trials: int = 101,
               tau: float = 0.01, jobs: int = 1, timing: bool = False,
               path_len: int = PATH_LEN):
    """Run ``trials`` independent trials; returns (records, summary).

    Trial ``t`` draws from the Philox stream ``(cfg.seed, t)``, so results do
    not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    tasks = [(cfg, tuple(methods), tau, t, timing, path_len) for t in range(trials)]
    per_trial = pmap(run_trial, tasks, jobs, chunksize=1)
    records = sorted(
        (r for rs in per_trial for r in rs),
        key=lambda r: (r.trial, METHODS.index(r.method), TARGETS.index(r.target)),
    )
    return records, summarize(records, methods, timing)
