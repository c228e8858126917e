import numpy as np
import pytest

from hdlingam.baselines import lasso_baseline, random_guess
from hdlingam.datagen import make_rng
from hdlingam.effects import topological_order
from hdlingam.linalg import Dataset, center
from hdlingam.sparse import lasso_bic


def test_lasso_on_independent_noise_is_near_empty():
    nonzero = cells = 0
    for seed in range(10):
        X = np.random.default_rng(900 + seed).laplace(size=(6, 500))
        B = lasso_baseline(Dataset(X)).B_hat
        nonzero += np.count_nonzero(B)
        cells += 30
    assert nonzero <= 0.01 * cells


def test_lasso_cannot_orient():
    rng = np.random.default_rng(1)
    x1 = rng.laplace(size=200)
    x2 = x1 + 0.1 * rng.standard_normal(200)
    for share in (0.0, 0.5):
        B = lasso_baseline(Dataset(np.vstack([x1, x2])), share).B_hat
        assert B[1, 0] != 0 and B[0, 1] != 0


def test_lasso_equals_per_row_calls():
    rng = np.random.default_rng(2)
    X = rng.laplace(size=(5, 40))
    X[2] += X[0] - X[4]
    est = lasso_baseline(Dataset(X))
    Xc = center(X)
    for i in range(5):
        others = [j for j in range(5) if j != i]
        np.testing.assert_array_equal(est.B_hat[i, others], lasso_bic(Xc[i], Xc[others]))
    assert est.method == "lasso" and np.array_equal(est.A_hat, est.B_hat)
    assert lasso_baseline(Dataset(X), 0.5).method == "enet"


def test_lasso_deterministic():
    X = np.random.default_rng(3).laplace(size=(8, 25))
    a = lasso_baseline(Dataset(X), 0.5).B_hat
    b = lasso_baseline(Dataset(X), 0.5, jobs=2).B_hat
    assert np.array_equal(a, b)


def test_random_guess_empty():
    est = random_guess(np.zeros((5, 5)), np.zeros((5, 5)), make_rng(0))
    assert not est.B_hat.any() and not est.A_hat.any()


def test_random_guess_saturated():
    p = 6
    full = np.tril(np.ones((p, p)), -1)
    est = random_guess(full, full, make_rng(1))
    assert np.count_nonzero(est.B_hat) == p * (p - 1) // 2
    topological_order(est.B_hat)


@pytest.mark.parametrize("nb, na", [(1, 7), (5, 5), (12, 3)])
def test_random_guess_counts_and_acyclicity(nb, na):
    p = 7
    rows, cols = np.tril_indices(p, -1)
    B_ref = np.zeros((p, p))
    A_ref = np.zeros((p, p))
    B_ref[rows[:nb], cols[:nb]] = 0.7
    A_ref[rows[-na:], cols[-na:]] = -1.1
    est = random_guess(B_ref, A_ref, make_rng(2))
    assert np.count_nonzero(est.B_hat) == nb
    assert np.count_nonzero(est.A_hat) == na
    union = (est.B_hat != 0) | (est.A_hat != 0)
    topological_order(union.astype(float))  # one shared order: jointly acyclic


def test_random_guess_ignores_diagonal_and_tiny():
    ref = np.eye(4) + 1e-15
    est = random_guess(ref, ref, make_rng(3))
    assert not est.B_hat.any()
