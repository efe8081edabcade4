import numpy as np
import pytest

from phase_1.core.errors_v1 import ShapeError, UnsupportedStructureError
from phase_2.eventum.compatibility_v1 import check_compatibility
from phase_2.eventum.worlds_v1 import alternative_world, beable_basis, world_overlap
from phase_2.models.autonomous_v1 import cycle_model
from phase_2.models.ring_worlds_v1 import qubit_chain_shift

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@pytest.fixture
def chain():
    return qubit_chain_shift(4, 2)


def test_hadamard_world_is_compatible(chain):
    rotated = alternative_world(chain, HADAMARD)
    assert rotated.report.compatible
    assert rotated.f == chain.f
    np.testing.assert_allclose(rotated.structure["rotation"], HADAMARD)
    report = check_compatibility(rotated.unitary, rotated.num_labels, rotated.dim_l, labels=rotated.labels, window=rotated.window)
    assert report.compatible


def test_rotated_worlds_disagree_on_their_facts(chain):
    rotated = alternative_world(chain, HADAMARD)
    assert world_overlap(chain, rotated) > 0.5
    assert world_overlap(rotated, chain) > 0.5


def test_identity_rotation_gives_the_same_world(chain):
    same = alternative_world(chain, np.eye(2))
    assert same.f == chain.f
    np.testing.assert_allclose(same.unitary, chain.unitary)
    assert world_overlap(chain, same) < 1e-10


def test_rotations_compose(chain):
    phase = np.diag([1.0, np.exp(0.3j)])
    twice = alternative_world(alternative_world(chain, HADAMARD), phase)
    np.testing.assert_allclose(twice.structure["rotation"], HADAMARD @ phase)
    assert twice.report.compatible


def test_beable_basis_is_orthonormal(chain):
    basis = beable_basis(alternative_world(chain, HADAMARD)).basis
    gram = np.einsum("kij,lij->kl", np.conjugate(basis), basis)
    np.testing.assert_allclose(gram, np.eye(chain.num_labels), atol=1e-12)


def test_alternative_world_needs_a_ring():
    with pytest.raises(UnsupportedStructureError):
        alternative_world(cycle_model([np.eye(2), np.eye(2)]), HADAMARD)


def test_alternative_world_rejects_non_unitary_rotation(chain):
    with pytest.raises(ShapeError):
        alternative_world(chain, np.diag([1.0, 2.0]))
