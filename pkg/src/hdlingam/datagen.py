"""Synthetic LiNGAM data with known ground truth.

Structure: strictly lower-triangular Bernoulli(s) support with
``s = expected_degree / (p - 1)``; nonzero coefficients are uniform on
``[-1.5, -0.5] U [0.5, 1.5]``. External influences pick one of three
non-Gaussian families per variable, are scaled to a variance drawn from
``[1, 3]`` and shifted by a ``N(0, 4)`` constant. Observed variables are
propagated through the DAG and the rows are then randomly permuted.

Noise families (each standardized to mean 0, variance 1 before scaling):

``asym_mixture``  0.75 N(0, 1) + 0.25 N(3, 1)   (bimodal, skewed)
``sym_mixture``   0.5 N(-2, 1) + 0.5 N(2, 1)    (bimodal, symmetric)
``laplace``       Laplace with scale 1/sqrt(2)

Random numbers come from numpy's Philox counter-based generator keyed by
``(seed, stream)``, so each trial is reproducible on its own.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .effects import total_from_direct
from .linalg import Dataset

FAMILIES = ("asym_mixture", "sym_mixture", "laplace")
DEGREE_CHOICES = (2.0, 5.0)

# (weight of first component, mean 1, mean 2), both components unit variance
_MIXTURES = {
    "asym_mixture": (0.75, 0.0, 3.0),
    "sym_mixture": (0.5, -2.0, 2.0),
}


def make_rng(seed: int, stream: int = 0, substream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(stream), int(substream)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GeneratorConfig:
    p: int = 100
    n: int = 30
    expected_degree: float | None = None  # None: fair coin between 2 and 5 per dataset
    coef_low: float = 0.5
    coef_high: float = 1.5
    noise_var_low: float = 1.0
    noise_var_high: float = 3.0
    mean_sd: float = 2.0
    seed: int = 0
    noise_families: tuple = FAMILIES  # drawn uniformly per variable

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.expected_degree is not None:
            self.sparseness(self.expected_degree)
        if not 0 <= self.coef_low <= self.coef_high:
            raise ValueError("need 0 <= coef_low <= coef_high")
        if not 0 <= self.noise_var_low <= self.noise_var_high:
            raise ValueError("need 0 <= noise_var_low <= noise_var_high")
        object.__setattr__(self, "noise_families", tuple(self.noise_families))
        bad = set(self.noise_families) - set(FAMILIES)
        if not self.noise_families or bad:
            raise ValueError(f"noise_families must be a nonempty subset of {FAMILIES}")

    def sparseness(self, degree: float) -> float:
        s = degree / (self.p - 1)
        if not 0 < s <= 1:
            raise ValueError(f"expected degree {degree} gives sparseness {s} outside (0, 1]")
        return s

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GroundTruth:
    B_true: np.ndarray
    A_true: np.ndarray
    permutation: np.ndarray   # data row k holds generated variable permutation[k]
    families: list
    noise_var: np.ndarray
    noise_mean: np.ndarray
    expected_degree: float


def resolve_degree(cfg: GeneratorConfig, rng) -> float:
    if cfg.expected_degree is not None:
        return float(cfg.expected_degree)
    return DEGREE_CHOICES[int(rng.random() < 0.5)]


def sample_structure(cfg: GeneratorConfig, rng, degree: float | None = None) -> np.ndarray:
    """Strictly lower-triangular coefficient matrix in generation order."""
    if degree is None:
        degree = resolve_degree(cfg, rng)
    s = cfg.sparseness(degree)
    p = cfg.p
    rows, cols = np.tril_indices(p, -1)
    edge = rng.random(rows.size) < s
    sign = np.where(rng.random(rows.size) < 0.5, -1.0, 1.0)
    mag = cfg.coef_low + (cfg.coef_high - cfg.coef_low) * rng.random(rows.size)
    B = np.zeros((p, p))
    B[rows[edge], cols[edge]] = (sign * mag)[edge]
    return B


def standard_noise(family: str, n: int, rng) -> np.ndarray:
    """``n`` draws of a noise family, standardized to mean 0 and variance 1."""
    if family == "laplace":
        return rng.laplace(0.0, 1.0 / np.sqrt(2.0), n)
    try:
        w, m1, m2 = _MIXTURES[family]
    except KeyError:
        raise ValueError(f"unknown noise family {family!r}") from None
    first = rng.random(n) < w
    x = rng.standard_normal(n) + np.where(first, m1, m2)
    mean = w * m1 + (1 - w) * m2
    var = 1.0 + w * (1 - w) * (m2 - m1) ** 2
    return (x - mean) / np.sqrt(var)


def sample_noise(cfg: GeneratorConfig, rng, index: int = 0, family: str | None = None):
    """External influence for one variable.

    Returns ``(sample, family, variance, mean)``. ``index`` is informational;
    all randomness comes from ``rng``.
    """
    if family is None:
        fams = cfg.noise_families
        family = fams[int(rng.integers(len(fams)))]
    var = cfg.noise_var_low + (cfg.noise_var_high - cfg.noise_var_low) * rng.random()
    mean = cfg.mean_sd * rng.standard_normal()
    e = np.sqrt(var) * standard_noise(family, cfg.n, rng) + mean
    return e, family, var, mean


def propagate(B: np.ndarray, E: np.ndarray) -> np.ndarray:
    """Solve ``x = B x + e`` by forward substitution (``B`` strictly lower)."""
    X = np.array(E, dtype=float)
    for i in range(1, B.shape[0]):
        nz = np.flatnonzero(B[i, :i])
        if nz.size:
            X[i] += B[i, nz] @ X[nz]
    return X


def synthesize(cfg: GeneratorConfig, rng=None, stream: int = 0):
    """Generate one dataset and its ground truth.

    If ``rng`` is None a Philox stream keyed by ``(cfg.seed, stream)`` is used.
    """
    if rng is None:
        rng = make_rng(cfg.seed, stream)
    degree = resolve_degree(cfg, rng)
    B = sample_structure(cfg, rng, degree)
    E = np.empty((cfg.p, cfg.n))
    families, var, mean = [], np.empty(cfg.p), np.empty(cfg.p)
    for i in range(cfg.p):
        E[i], fam, var[i], mean[i] = sample_noise(cfg, rng, i)
        families.append(fam)
    X = propagate(B, E)
    perm = rng.permutation(cfg.p)
    B_true = B[np.ix_(perm, perm)]
    truth = GroundTruth(
        B_true=B_true,
        A_true=total_from_direct(B_true).A,
        permutation=perm,
        families=[families[i] for i in perm],
        noise_var=var[perm],
        noise_mean=mean[perm],
        expected_degree=degree,
    )
    data = Dataset(X[perm], [f"x{k + 1}" for k in range(cfg.p)])
    return data, truth
