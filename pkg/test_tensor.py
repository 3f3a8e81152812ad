"""
Tests for dense tensors, contractions and semi-symmetrization.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gte_lm.exceptions import DimensionMismatchError, InvalidTensorError
from gte_lm.tensor import (
    DenseTensor,
    contract_batch,
    contract_to_matrix,
    contract_to_scalar,
    contract_to_vector,
    is_semi_symmetric,
    max_abs_entry,
    semi_symmetrize,
    unit_tensor,
)


def naive_contractions(A: DenseTensor, x: np.ndarray):
    """Nested-loop reference for A x^{l-1}, A x^{l-2} and A x^l."""
    n, l = A.dim, A.order
    arr = A.array
    vec = np.zeros(n)
    mat = np.zeros((n, n))
    for idx in itertools.product(range(n), repeat=l):
        a = arr[idx]
        vec[idx[0]] += a * np.prod([x[j] for j in idx[1:]])
        mat[idx[0], idx[1]] += a * np.prod([x[j] for j in idx[2:]])
    return vec, mat, float(x @ vec)


def random_tensor(rng, order, dim):
    return DenseTensor.from_array(rng.uniform(-1.0, 1.0, (dim,) * order))


@pytest.mark.parametrize("order", [3, 4, 5])
@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_contractions_match_nested_loops(order, dim):
    rng = np.random.default_rng(1000 * order + dim)
    for _ in range(50):
        A = random_tensor(rng, order, dim)
        x = rng.uniform(-1.0, 1.0, dim)
        vec, mat, scalar = naive_contractions(A, x)
        scale = np.abs(A.entries).sum()

        np.testing.assert_allclose(contract_to_vector(A, x), vec, rtol=1e-12, atol=1e-12 * scale)
        np.testing.assert_allclose(contract_to_matrix(A, x), mat, rtol=1e-12, atol=1e-12 * scale)
        assert contract_to_scalar(A, x) == pytest.approx(scalar, rel=1e-12, abs=1e-12 * scale)


def test_order_two_tensor_contracts_like_its_matrix():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((4, 4))
    A = DenseTensor.from_array(M)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(contract_to_vector(A, x), M @ x)
    np.testing.assert_array_equal(contract_to_matrix(A, x), M)


def test_contract_batch_matches_rowwise():
    rng = np.random.default_rng(7)
    A = random_tensor(rng, 4, 3)
    X = rng.standard_normal((25, 3))
    batch = contract_batch(A, X)
    assert batch.shape == (25, 3)
    for row, x in zip(batch, X):
        np.testing.assert_allclose(row, contract_to_vector(A, x), rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    order=st.integers(min_value=2, max_value=5),
    dim=st.integers(min_value=1, max_value=4),
    c=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_contraction_is_homogeneous(order, dim, c, seed):
    rng = np.random.default_rng(seed)
    A = random_tensor(rng, order, dim)
    x = rng.uniform(-1.0, 1.0, dim)
    np.testing.assert_allclose(
        contract_to_vector(A, c * x), c ** (order - 1) * contract_to_vector(A, x), rtol=1e-10, atol=1e-10
    )


@settings(max_examples=30, deadline=None)
@given(
    order=st.integers(min_value=3, max_value=5),
    dim=st.integers(min_value=1, max_value=4),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_semi_symmetrize_preserves_contraction(order, dim, seed):
    rng = np.random.default_rng(seed)
    A = random_tensor(rng, order, dim)
    S = semi_symmetrize(A)
    x = rng.uniform(-1.0, 1.0, dim)

    assert is_semi_symmetric(S)
    np.testing.assert_allclose(contract_to_vector(S, x), contract_to_vector(A, x), rtol=1e-12, atol=1e-12)


def test_semi_symmetrize_is_bitwise_idempotent():
    rng = np.random.default_rng(11)
    S = semi_symmetrize(random_tensor(rng, 4, 3))
    again = semi_symmetrize(S)
    assert again is S
    np.testing.assert_array_equal(semi_symmetrize(DenseTensor(4, 3, S.entries)).entries, S.entries)


def test_semi_symmetrize_averages_two_index_permutations():
    arr = np.zeros((2, 2, 2))
    arr[0, 0, 1] = 2.0
    S = semi_symmetrize(DenseTensor.from_array(arr)).array
    assert S[0, 0, 1] == S[0, 1, 0] == 1.0
    assert np.count_nonzero(S) == 2


def test_scalar_contraction_of_multiple_root_fixture(pd_multiple_roots):
    assert contract_to_scalar(pd_multiple_roots, np.array([1.0, 1.0])) == pytest.approx(4.0, abs=1e-15)


def test_semi_symmetric_slices_are_symmetric():
    rng = np.random.default_rng(5)
    S = semi_symmetrize(random_tensor(rng, 4, 3)).array
    for i in range(3):
        for perm in itertools.permutations(range(3)):
            np.testing.assert_array_equal(S[i], S[i].transpose(perm))


def test_not_semi_symmetric_detected():
    arr = np.zeros((2, 2, 2))
    arr[0, 0, 1] = 1.0
    assert not is_semi_symmetric(DenseTensor.from_array(arr))
    assert is_semi_symmetric(DenseTensor.from_array(np.arange(4.0).reshape(2, 2)))


def test_unit_tensor_contracts_to_powers():
    x = np.array([2.0, -1.0, 0.5])
    np.testing.assert_allclose(contract_to_vector(unit_tensor(4, 3), x), x ** 3)


@pytest.mark.parametrize("order,dim,size", [(3, 2, 7), (2, 3, 10)])
def test_wrong_entry_count_rejected(order, dim, size):
    with pytest.raises(InvalidTensorError):
        DenseTensor(order, dim, np.zeros(size))


def test_invalid_tensors_rejected():
    with pytest.raises(InvalidTensorError):
        DenseTensor(1, 3, np.zeros(3))
    with pytest.raises(InvalidTensorError):
        DenseTensor(2, 2, np.array([1.0, np.nan, 0.0, 0.0]))
    with pytest.raises(InvalidTensorError):
        DenseTensor(2, 2, np.array([1.0, np.inf, 0.0, 0.0]))


def test_entries_are_read_only():
    A = DenseTensor(2, 2, np.arange(4.0))
    with pytest.raises(ValueError):
        A.entries[0] = 5.0


def test_dimension_mismatch():
    A = unit_tensor(3, 3)
    with pytest.raises(DimensionMismatchError):
        contract_to_vector(A, np.ones(2))
    with pytest.raises(DimensionMismatchError):
        contract_batch(A, np.ones((4, 2)))


def test_max_abs_entry():
    A = DenseTensor(2, 2, np.array([1.0, -7.0, 2.0, 0.0]))
    assert max_abs_entry(A) == 7.0
    assert max_abs_entry(A, [3.0, -9.0]) == 9.0
