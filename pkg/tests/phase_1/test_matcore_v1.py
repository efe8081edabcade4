import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phase_1.core.errors_v1 import MatrixSizeError, NotAnIsometryError, ShapeError, StateError
from phase_1.core.matcore_v1 import (
    BasisPartition,
    complete_isometry,
    dagger,
    expand_operator,
    haar_unitary,
    is_density_matrix,
    isometry_to_unitary,
    partial_trace,
    pinch,
    pure_state,
    random_density_matrix,
    reduce_density,
    require_density_matrix,
    residual,
    tensor,
    trace_distance,
    uniform_partition,
    unitarity_residual,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_tensor_identity():
    np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_places_block_in_top_left_quadrant():
    x = np.array([[0, 1], [1, 0]])
    out = tensor(np.diag([1, 0]), x)
    np.testing.assert_array_equal(out[:2, :2], x)
    assert np.count_nonzero(out[2:, :]) == 0
    assert np.count_nonzero(out[:, 2:]) == 0


def test_tensor_rectangular_shape():
    assert tensor(np.ones((2, 3)), np.ones((3, 2))).shape == (6, 6)


def test_tensor_respects_dimension_cap():
    with pytest.raises(MatrixSizeError):
        tensor(np.eye(64), np.eye(128), max_dim=4096)


def test_partition_must_cover_contiguously():
    with pytest.raises(ShapeError):
        BasisPartition(total_dim=4, blocks=(("a", range(0, 2)), ("b", range(3, 4))))


def test_pinch_all_ones():
    p = uniform_partition(["a", "b"], 2)
    out = pinch(np.ones((4, 4)), p)
    expected = np.kron(np.eye(2), np.ones((2, 2)))
    np.testing.assert_array_equal(out, expected)


def test_pinch_fixes_block_diagonal(rng):
    p = uniform_partition([0, 1, 2], 2)
    m = np.zeros((6, 6), dtype=np.complex128)
    for i in range(3):
        m[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rng.normal(size=(2, 2))
    np.testing.assert_array_equal(pinch(m, p), m)


@settings(deadline=None, max_examples=25)
@given(seed=seeds)
def test_pinch_is_idempotent(seed):
    r = np.random.default_rng(seed)
    p = uniform_partition(range(3), 2)
    m = r.normal(size=(6, 6)) + 1j * r.normal(size=(6, 6))
    np.testing.assert_allclose(pinch(pinch(m, p), p), pinch(m, p))


def test_partial_trace_of_product(rng):
    rho = random_density_matrix(2, rng)
    sigma = random_density_matrix(3, rng)
    np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), (2, 3), keep="first"), rho, atol=1e-12)
    np.testing.assert_allclose(partial_trace(np.kron(rho, sigma), (2, 3), keep="second"), sigma, atol=1e-12)


def test_partial_trace_of_maximally_entangled_state():
    bell = pure_state([1, 0, 0, 1])
    np.testing.assert_allclose(partial_trace(bell, (2, 2)), np.eye(2) / 2, atol=1e-12)


@settings(deadline=None, max_examples=25)
@given(seed=seeds)
def test_partial_trace_preserves_trace(seed):
    r = np.random.default_rng(seed)
    m = random_density_matrix(6, r)
    assert abs(np.trace(partial_trace(m, (2, 3))) - np.trace(m)) < 1e-12


def test_reduce_density_keeps_middle_factor(rng):
    a, b, c = (random_density_matrix(d, rng) for d in (2, 3, 2))
    out = reduce_density(np.kron(np.kron(a, b), c), [2, 3, 2], [1])
    np.testing.assert_allclose(out, b, atol=1e-12)


def test_expand_operator_matches_kron_on_leading_factor(rng):
    op = haar_unitary(2, rng)
    np.testing.assert_allclose(expand_operator(op, [2, 3], [0]), np.kron(op, np.eye(3)), atol=1e-14)


def test_expand_operator_reorders_targets(rng):
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    swapped = np.kron(b, a)
    lifted = expand_operator(swapped, [2, 3], [1, 0])
    np.testing.assert_allclose(lifted, np.kron(a, b), atol=1e-14)


def test_expand_operator_rejects_repeated_targets():
    with pytest.raises(ShapeError):
        expand_operator(np.eye(4), [2, 2], [0, 0])


def test_complete_isometry_identity():
    np.testing.assert_allclose(complete_isometry(np.eye(3)), np.eye(3))


def test_complete_isometry_single_column():
    u = complete_isometry(np.array([[1.0], [0.0], [0.0]]))
    np.testing.assert_allclose(u[:, 0], [1, 0, 0])
    assert unitarity_residual(u) < 1e-12


def test_complete_isometry_random(rng):
    v = haar_unitary(6, rng)[:, :2]
    u = complete_isometry(v)
    np.testing.assert_allclose(u[:, :2], v)
    assert unitarity_residual(u) < 1e-10


def test_complete_isometry_rejects_non_isometry():
    with pytest.raises(NotAnIsometryError):
        complete_isometry(np.array([[1.0], [1.0]]))


def test_complete_isometry_needs_tall_input():
    with pytest.raises(ShapeError):
        complete_isometry(np.ones((2, 3)))


def test_isometry_to_unitary_places_columns(rng):
    v = haar_unitary(4, rng)[:, :2]
    u = isometry_to_unitary({1: v[:, 0], 3: v[:, 1]}, 4)
    np.testing.assert_allclose(u[:, 1], v[:, 0])
    np.testing.assert_allclose(u[:, 3], v[:, 1])
    assert unitarity_residual(u) < 1e-10


def test_residual_values():
    assert residual(np.zeros((3, 3))) == 0.0
    assert residual(np.eye(2)) == pytest.approx(np.sqrt(2))


def test_haar_unitary_is_unitary(rng):
    assert unitarity_residual(haar_unitary(5, rng)) < 1e-10


def test_density_matrix_checks(rng):
    rho = random_density_matrix(3, rng)
    assert is_density_matrix(rho)
    assert not is_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(StateError):
        require_density_matrix(np.diag([1.5, -0.5]))


def test_trace_distance_orthogonal_states():
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
    rho = pure_state([1, 1])
    assert trace_distance(rho, dagger(rho)) < 1e-14


@settings(deadline=None, max_examples=25)
@given(seed=seeds)
def test_pinch_preserves_trace_and_commutes_with_adjoint(seed):
    r = np.random.default_rng(seed)
    p = BasisPartition(total_dim=6, blocks=(("a", range(0, 1)), ("b", range(1, 4)), ("c", range(4, 6))))
    m = r.normal(size=(6, 6)) + 1j * r.normal(size=(6, 6))
    assert abs(np.trace(pinch(m, p)) - np.trace(m)) < 1e-12
    np.testing.assert_allclose(pinch(dagger(m), p), dagger(pinch(m, p)))


def test_tensor_is_associative(rng):
    a, b, c = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in (2, 3, 2))
    np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-12)
