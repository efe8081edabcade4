import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phase_1.algebra.vnalg_v1 import (
    algebra_from_span,
    bicommutant,
    center,
    commutant,
    diagonal_algebra,
    equal_algebras,
    full_algebra,
    inclusion_residual,
    is_commutative,
    membership,
    pinched_membership,
    scalar_algebra,
    tensor_algebra,
)
from phase_1.core.errors_v1 import ShapeError
from phase_1.core.matcore_v1 import basis_projector, dagger, residual, uniform_partition

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.diag([1.0, -1.0]).astype(np.complex128)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return g + dagger(g)


def assert_algebra_invariants(a):
    gram = np.einsum("kij,lij->kl", np.conjugate(a.basis), a.basis)
    np.testing.assert_allclose(gram, np.eye(a.size), atol=1e-10)
    for b in a.basis:
        assert membership(dagger(b), a) < 1e-10
    assert membership(np.eye(a.dim), a) < 1e-10


@pytest.mark.parametrize("dim", [2, 3, 8])
def test_commutant_of_diagonal_projectors_is_diagonal(dim):
    comm = commutant([basis_projector(dim, x) for x in range(dim)], dim)
    assert comm.size == dim
    assert equal_algebras(comm, diagonal_algebra(dim)) < 1e-10


def test_commutant_of_identity_is_everything():
    assert commutant([np.eye(3)], 3).size == 9


def test_commutant_of_flip_and_phase_is_scalars():
    comm = commutant([PAULI_X, PAULI_Z], 2)
    assert comm.size == 1
    assert equal_algebras(comm, scalar_algebra(2)) < 1e-10


def test_commutant_of_empty_set_is_full_algebra():
    assert commutant([], 2).size == 4


def test_commutant_rejects_wrong_shape():
    with pytest.raises(ShapeError):
        commutant([np.eye(3)], 2)


def test_commutant_adds_adjoints_of_non_hermitian_generators():
    raising = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    comm = commutant([raising], 2)
    assert comm.size == 1


def test_commutant_is_a_unital_star_algebra(rng):
    g = random_hermitian(2, rng)
    comm = commutant([np.kron(g, np.eye(2))], 4)
    assert_algebra_invariants(comm)


def test_bicommutant_of_diagonal_projectors():
    bic = bicommutant([basis_projector(3, x) for x in range(3)], 3)
    assert bic.size == 3
    assert equal_algebras(bic, diagonal_algebra(3)) < 1e-10


def test_bicommutant_of_flip_is_its_span():
    bic = bicommutant([PAULI_X], 2)
    assert bic.size == 2
    span = algebra_from_span([np.eye(2), PAULI_X], 2)
    assert equal_algebras(bic, span) < 1e-10


@settings(deadline=None, max_examples=15)
@given(seed=seeds)
def test_bicommutant_is_idempotent(seed):
    r = np.random.default_rng(seed)
    gens = [np.kron(random_hermitian(2, r), np.eye(2))]
    once = bicommutant(gens, 4)
    twice = bicommutant(list(once.basis), 4)
    assert once.size == twice.size
    assert equal_algebras(once, twice) < 1e-9


def test_center_of_full_algebra_is_scalars():
    assert center(full_algebra(3)).size == 1


def test_center_of_diagonal_algebra_is_itself():
    cen = center(diagonal_algebra(3))
    assert cen.size == 3
    assert equal_algebras(cen, diagonal_algebra(3)) < 1e-10


def test_center_of_predictables_is_the_beables():
    predictables = tensor_algebra(diagonal_algebra(2), full_algebra(2))
    beables = tensor_algebra(diagonal_algebra(2), scalar_algebra(2))
    cen = center(predictables)
    assert cen.size == 2
    assert equal_algebras(cen, beables) < 1e-10


def test_membership_examples():
    assert membership(np.eye(3), diagonal_algebra(3)) < 1e-12
    assert membership(PAULI_X, diagonal_algebra(2)) == pytest.approx(np.sqrt(2))
    a = full_algebra(2)
    for b in a.basis:
        assert membership(b, a) < 1e-12


def test_is_commutative():
    assert is_commutative(diagonal_algebra(4))
    assert not is_commutative(full_algebra(2))
    assert is_commutative(algebra_from_span([np.eye(2), PAULI_X], 2))


def test_tensor_algebra_dimensions():
    assert tensor_algebra(diagonal_algebra(2), scalar_algebra(2)).size == 2
    assert tensor_algebra(diagonal_algebra(2), full_algebra(2)).size == 8
    scalars = tensor_algebra(scalar_algebra(2), scalar_algebra(3))
    assert scalars.size == 1
    assert equal_algebras(scalars, scalar_algebra(6)) < 1e-12


def test_inclusion_residual_is_directional():
    assert inclusion_residual(diagonal_algebra(2), full_algebra(2)) < 1e-12
    assert inclusion_residual(full_algebra(2), diagonal_algebra(2)) > 0.5


@pytest.mark.parametrize("dims", [(2, 2), (2, 3)])
def test_commutant_of_tensor_product_factorizes(dims, rng):
    da, db = dims
    for _ in range(20):
        a = bicommutant([random_hermitian(da, rng)], da)
        b = bicommutant([random_hermitian(db, rng)], db)
        lhs = commutant(list(tensor_algebra(a, b).basis), da * db)
        rhs = tensor_algebra(commutant(list(a.basis), da), commutant(list(b.basis), db))
        assert lhs.size == rhs.size
        assert equal_algebras(lhs, rhs) < 1e-9


@pytest.mark.parametrize("num_labels", [2, 3])
@pytest.mark.parametrize("dim_l", [2, 3])
def test_beables_and_predictables_are_mutual_commutants(num_labels, dim_l):
    dim = num_labels * dim_l
    beables = tensor_algebra(diagonal_algebra(num_labels), scalar_algebra(dim_l))
    predictables = tensor_algebra(diagonal_algebra(num_labels), full_algebra(dim_l))
    assert equal_algebras(commutant(list(beables.basis), dim), predictables) < 1e-10
    assert equal_algebras(commutant(list(predictables.basis), dim), beables) < 1e-10


def test_span_basis_is_orthonormal(rng):
    mats = [rng.normal(size=(3, 3)) for _ in range(4)]
    span = algebra_from_span(mats + [mats[0] + mats[1]], 3)
    assert span.size == 4
    for m in mats:
        assert membership(m, span) < 1e-10
    assert residual(np.einsum("kij,lij->kl", np.conjugate(span.basis), span.basis) - np.eye(4)) < 1e-10


def test_pinched_membership_measures_off_block_weight():
    p = uniform_partition(["a", "b"], 2)
    block_diagonal = np.kron(np.diag([1.0, 2.0]), np.ones((2, 2)))
    assert pinched_membership(block_diagonal, p) < 1e-14
    m = block_diagonal.astype(np.complex128)
    m[0, 3] = 3.0
    assert pinched_membership(m, p) == pytest.approx(3.0)


@settings(deadline=None, max_examples=20)
@given(seed=seeds)
def test_commutant_reverses_inclusion_of_generator_sets(seed):
    r = np.random.default_rng(seed)
    small = [basis_projector(4, 0) + basis_projector(4, 1)]
    large = small + [random_hermitian(4, r)]
    # more generators, smaller commutant
    assert inclusion_residual(commutant(large, 4), commutant(small, 4)) < 1e-8
    assert commutant(large, 4).size <= commutant(small, 4).size
