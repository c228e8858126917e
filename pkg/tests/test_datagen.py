import numpy as np
import pytest
from scipy import stats

from hdlingam.datagen import (FAMILIES, GeneratorConfig, make_rng, propagate, sample_noise,
                              sample_structure, standard_noise, synthesize)
from hdlingam.effects import topological_order


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(p=1)
    with pytest.raises(ValueError):
        GeneratorConfig(p=3, expected_degree=5)
    with pytest.raises(ValueError):
        GeneratorConfig(noise_families=("gaussian",))
    assert GeneratorConfig().sparseness(2) == pytest.approx(2 / 99)


def test_edge_count_mean():
    cfg = GeneratorConfig(p=100, expected_degree=2)
    counts = np.array([np.count_nonzero(sample_structure(cfg, make_rng(s)))
                       for s in range(1000)])
    s = 2 / 99
    pairs = 100 * 99 / 2
    assert s * pairs == pytest.approx(100)
    se = np.sqrt(pairs * s * (1 - s) / 1000)
    assert abs(counts.mean() - 100) < 3 * se


def test_structure_shape_and_magnitudes():
    B = sample_structure(GeneratorConfig(p=60, expected_degree=5), make_rng(1))
    assert not np.any(np.triu(B))
    mags = np.abs(B[B != 0])
    assert mags.min() >= 0.5 and mags.max() <= 1.5
    signs = np.sign(B[B != 0])
    assert (signs > 0).any() and (signs < 0).any()


def test_degree_coin_is_fair():
    assert GeneratorConfig().expected_degree is None
    degrees = [synthesize(GeneratorConfig(p=10, n=3, seed=s))[1].expected_degree
               for s in range(400)]
    assert set(degrees) == {2.0, 5.0}
    frac = np.mean(np.array(degrees) == 2.0)
    assert abs(frac - 0.5) < 3 * np.sqrt(0.25 / 400)


@pytest.mark.parametrize("family", FAMILIES)
def test_noise_variance_and_mean(family):
    cfg = GeneratorConfig(n=1_000_000)
    e, fam, var, mean = sample_noise(cfg, make_rng(2, 0, FAMILIES.index(family)), family=family)
    assert fam == family and 1 <= var <= 3
    assert abs(e.var() / var - 1) < 0.02
    assert abs(e.mean() - mean) < 5 * np.sqrt(var / cfg.n)


def test_laplace_kurtosis():
    z = standard_noise("laplace", 1_000_000, make_rng(3))
    assert abs(stats.kurtosis(z) - 3.0) < 0.3


def test_asymmetric_mixture_skew():
    z = standard_noise("asym_mixture", 1_000_000, make_rng(4))
    assert abs(stats.skew(z)) > 0.3


def test_symmetric_mixture_is_symmetric_and_bimodal():
    z = standard_noise("sym_mixture", 1_000_000, make_rng(5))
    assert abs(stats.skew(z)) < 0.01
    assert stats.kurtosis(z) < -1.0


def test_null_structure_passes_noise_through():
    cfg = GeneratorConfig(p=3, n=100_000, expected_degree=None, seed=6)
    rng = make_rng(6)
    E = np.vstack([sample_noise(cfg, rng, i)[0] for i in range(3)])
    np.testing.assert_array_equal(propagate(np.zeros((3, 3)), E), E)
    assert np.all((E.var(axis=1) > 0.95) & (E.var(axis=1) < 3.1))


def test_propagate_noiseless_chain():
    B = np.zeros((3, 3))
    B[1, 0], B[2, 1] = 1.3, -0.7
    E = np.zeros((3, 5))
    E[0] = np.arange(5.0)
    X = propagate(B, E)
    np.testing.assert_allclose(X[1], 1.3 * X[0])
    np.testing.assert_allclose(X[2], -0.7 * X[1])


def test_permutation_round_trip():
    cfg = GeneratorConfig(p=12, n=40, seed=8)
    data, truth = synthesize(cfg, stream=3)
    inv = np.argsort(truth.permutation)
    # replay the draw order up to the permutation
    rng = make_rng(8, 3)
    rng.random()  # degree coin
    B = sample_structure(cfg, rng, truth.expected_degree)
    E = np.vstack([sample_noise(cfg, rng, i)[0] for i in range(cfg.p)])
    X = propagate(B, E)
    assert np.array_equal(data.values[inv], X)
    assert np.array_equal(truth.B_true[np.ix_(inv, inv)], B)


def test_ground_truth_consistency():
    data, truth = synthesize(GeneratorConfig(p=30, n=20, seed=9))
    topological_order(truth.B_true)
    p = data.p
    np.testing.assert_allclose((np.eye(p) - truth.B_true) @ (np.eye(p) + truth.A_true),
                               np.eye(p), atol=1e-10)
    assert data.var_ids == [f"x{k + 1}" for k in range(p)]


def test_deterministic_and_stream_separated():
    cfg = GeneratorConfig(p=20, n=15, seed=10)
    a, ta = synthesize(cfg, stream=0)
    b, tb = synthesize(cfg, stream=0)
    c, _ = synthesize(cfg, stream=1)
    assert np.array_equal(a.values, b.values) and np.array_equal(ta.B_true, tb.B_true)
    assert not np.array_equal(a.values, c.values)


def test_covariance_converges():
    cfg = GeneratorConfig(p=5, n=100_000, expected_degree=2, seed=11)
    data, truth = synthesize(cfg)
    M = np.eye(5) + truth.A_true
    expected = M @ np.diag(truth.noise_var) @ M.T
    got = np.cov(data.values)
    assert np.linalg.norm(got - expected) / np.linalg.norm(expected) < 0.05


def test_single_family_option():
    _, truth = synthesize(GeneratorConfig(p=10, n=5, noise_families=("laplace",)))
    assert set(truth.families) == {"laplace"}
