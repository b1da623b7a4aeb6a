import numpy as np
import pytest

from linalg import (
    form_leq,
    generalized_eig,
    generalized_eig_with_null,
    joint_null_basis,
    parallel_sum,
    parallel_sum_fold,
    pseudo_inverse,
)


def _psd(rng, n, rank):
    X = rng.standard_normal((n, rank))
    return X @ X.T


def test_pseudo_inverse_penrose_conditions(rng):
    M = _psd(rng, 6, 3)
    P = pseudo_inverse(M)
    np.testing.assert_allclose(M @ P @ M, M, atol=1e-10)
    np.testing.assert_allclose(P @ M @ P, P, atol=1e-10)
    np.testing.assert_allclose(P, P.T, atol=1e-12)
    assert np.all(pseudo_inverse(np.zeros((3, 3))) == 0)


def test_pseudo_inverse_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        pseudo_inverse(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_parallel_sum_of_spd_is_harmonic(rng):
    A, B = _psd(rng, 4, 4) + np.eye(4), _psd(rng, 4, 4) + np.eye(4)
    expected = np.linalg.inv(np.linalg.inv(A) + np.linalg.inv(B))
    np.testing.assert_allclose(parallel_sum(A, B), expected, rtol=1e-10, atol=1e-12)


def test_parallel_sum_properties(rng):
    for _ in range(1000):
        A, B = _psd(rng, 4, 2), _psd(rng, 4, 1)
        P = parallel_sum(A, B)
        scale = np.abs(A).max() + np.abs(B).max()

        np.testing.assert_allclose(P, parallel_sum(B, A), atol=1e-9 * scale)
        assert form_leq(P, A) and form_leq(P, B)
        assert np.linalg.eigvalsh(P).min() >= -1e-9 * scale

        x, y = rng.standard_normal(4), rng.standard_normal(4)
        z = x + y
        assert z @ P @ z <= x @ A @ x + y @ B @ y + 1e-9 * scale * (z @ z + x @ x + y @ y)


def test_parallel_sum_validation():
    with pytest.raises(ValueError):
        parallel_sum(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        parallel_sum_fold([np.eye(2)])


def test_parallel_sum_fold_matches_pairwise(rng):
    mats = [_psd(rng, 3, 3) + np.eye(3) for _ in range(4)]
    expected = np.linalg.inv(sum(np.linalg.inv(M) for M in mats))
    np.testing.assert_allclose(parallel_sum_fold(mats), expected, rtol=1e-9, atol=1e-12)


def test_generalized_eig_diagonal():
    pairs = generalized_eig(np.diag([2.0, 1.0]), np.eye(2))
    np.testing.assert_allclose([p.value for p in pairs], [2.0, 1.0])
    A = np.diag([2.0, 1.0])
    for p in pairs:
        assert p.normalization == "A"
        assert p.vector @ A @ p.vector == pytest.approx(1.0)


def test_generalized_eig_infinite_pair():
    pairs = generalized_eig(np.eye(2), np.diag([1.0, 0.0]))
    assert np.isinf(pairs[0].value) and pairs[0].is_infinite
    assert pairs[1].value == pytest.approx(1.0)
    np.testing.assert_allclose(np.abs(pairs[0].vector), [0.0, 1.0], atol=1e-12)


def test_generalized_eig_joint_null_and_zero_pairs():
    A, B = np.diag([1.0, 0.0, 0.0]), np.diag([1.0, 1.0, 0.0])
    pairs, null = generalized_eig_with_null(A, B)
    assert len(pairs) == 2
    assert pairs[0].value == pytest.approx(1.0)
    assert pairs[1].value == 0.0 and pairs[1].normalization == "B"
    assert null.shape == (3, 1)
    np.testing.assert_allclose(np.abs(null[:, 0]), [0.0, 0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(np.abs(joint_null_basis(A, B)[:, 0]), [0.0, 0.0, 1.0], atol=1e-12)


def test_generalized_eig_random_pencil(rng):
    A, B = _psd(rng, 5, 5), _psd(rng, 5, 5) + 0.1 * np.eye(5)
    pairs = generalized_eig(A, B)
    values = np.array([p.value for p in pairs])
    assert np.all(np.diff(values) <= 1e-12 * values.max())
    for p in pairs:
        np.testing.assert_allclose(A @ p.vector, p.value * (B @ p.vector), atol=1e-8 * np.abs(A).max())

    V = np.column_stack([p.vector for p in pairs])
    np.testing.assert_allclose(V.T @ A @ V, np.eye(5), atol=1e-8)


def test_generalized_eig_rejects_bad_input():
    with pytest.raises(ValueError):
        generalized_eig(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        generalized_eig(np.array([[1.0, 1.0], [0.0, 1.0]]), np.eye(2))
