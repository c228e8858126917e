import numpy as np
import pytest

from hdlingam.screening import abs_correlations, isis, round_size, sis_round


def centered_basis(rng, m, n):
    """m orthonormal, mean-zero vectors of length n."""
    A = rng.standard_normal((n, m))
    A -= A.mean(axis=0)
    Q, _ = np.linalg.qr(A)
    return Q.T


def test_round_size():
    assert round_size(30) == 8
    assert round_size(50) == 12
    assert round_size(2) == 2
    assert round_size(3) == 2


def test_sis_all_and_exact_match():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 20))
    assert sorted(sis_round(X[0], X, 6)) == list(range(6))
    assert sis_round(X[3], X, 1) == [3]


def test_sis_crafted_correlations():
    rng = np.random.default_rng(1)
    U = centered_basis(rng, 4, 40)
    y = U[0]
    X = np.array([c * U[0] + np.sqrt(1 - c * c) * U[a + 1]
                  for a, c in enumerate((0.1, 0.9, 0.5))])
    np.testing.assert_allclose(abs_correlations(y, X), [0.1, 0.9, 0.5], atol=1e-12)
    assert sis_round(y, X, 2) == [1, 2]


def test_sis_ties_go_to_lower_index():
    x = np.array([1.0, -1.0, 2.0, -2.0])
    X = np.vstack([-x, x, x])
    assert sis_round(x, X, 2) == [0, 1]


def test_isis_bypassed_when_small():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((5, 20))
    assert isis(X[0], X, 19).selected == [0, 1, 2, 3, 4]


def test_isis_rejects_large_target():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((40, 20))
    with pytest.raises(ValueError):
        isis(X[0], X, 20)


def test_isis_finds_true_predictors():
    hits = 0
    reps = 20
    for seed in range(reps):
        rng = np.random.default_rng(300 + seed)
        X = rng.standard_normal((100, 50))
        X -= X.mean(axis=1, keepdims=True)
        y = X[7] * 2.0 - X[42] * 1.5 + X[90] * 1.8 + 0.3 * rng.standard_normal(50)
        res = isis(y - y.mean(), X, 49)
        assert len(res.selected) <= 49
        assert len(set(res.selected)) == len(res.selected)
        hits += {7, 42, 90} <= set(res.selected)
    assert hits >= 0.9 * reps


def test_isis_noiseless_small_support():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((100, 40))
    X -= X.mean(axis=1, keepdims=True)
    y = 3.0 * X[5] - 2.0 * X[60]
    res = isis(y, X, 39)
    assert {5, 60} <= set(res.selected)


def test_isis_top_predictor_enters_first_round():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((80, 30))
    X -= X.mean(axis=1, keepdims=True)
    y = X[11] + 0.5 * rng.standard_normal(30)
    y -= y.mean()
    top = int(np.argmax(abs_correlations(y, X)))
    res = isis(y, X, 29)
    assert top in res.per_round[0][0]


def test_isis_never_exceeds_target():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((99, 30))
    X -= X.mean(axis=1, keepdims=True)
    y = X[:20].sum(axis=0)
    for target in (3, 10, 29):
        assert len(isis(y, X, target).selected) <= target
