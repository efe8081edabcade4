import numpy as np
import pytest

from phase_1.core.errors_v1 import FiniteBranchingError, HorizonError, ParameterError
from phase_1.core.matcore_v1 import basis_projector, pure_state
from phase_2.eventum.evolution_v1 import evolve
from phase_2.eventum.model_v1 import CQState
from phase_2.eventum.trajectories_v1 import sample_trajectories
from phase_2.models.autonomous_v1 import autonomous_model, cycle_model
from phase_2.models.random_worlds_v1 import random_autonomous_model, random_cq_state, random_kraus_model
from phase_2.models.ring_worlds_v1 import (
    qubit_chain_shift,
    ring_labels,
    ring_shift_model,
    ring_shift_permutation,
    ring_window,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
SWAP = np.eye(4)[[0, 2, 1, 3]]


def test_ring_labels_are_classical_words():
    assert ring_labels(2, 2) == ["0.0", "0.1", "1.0", "1.1"]
    assert ring_labels(3, 1) == ["0", "1", "2"]


def test_shift_of_two_cells_is_swap():
    np.testing.assert_array_equal(ring_shift_permutation(2, 2), SWAP)


def test_shift_moves_the_first_cell_to_the_end():
    perm = ring_shift_permutation(2, 3)
    out = perm @ np.eye(8)[:, 4]  # |100>
    np.testing.assert_array_equal(out, np.eye(8)[:, 1])  # |001>


def test_shift_respects_the_dimension_cap():
    with pytest.raises(ParameterError):
        ring_shift_permutation(2, 13, max_dim=4096)


def test_ring_model_window():
    model = qubit_chain_shift(4, 2)
    assert model.labels == ("0.0", "0.1", "1.0", "1.1")
    assert model.dim_l == 4
    assert model.step_budget == 2
    assert model.window.live_labels == frozenset({"0.0", "0.1"})
    assert model.f == {"0.0": "0.0", "0.1": "0.0", "1.0": "0.1", "1.1": "0.1"}


def test_ring_model_records_the_quantum_cell():
    model = qubit_chain_shift(4, 2)
    sigma = np.kron(pure_state([1, 1]), basis_projector(2, 0))
    states = evolve(model, CQState.point("0.0", sigma), 2)
    assert states[1].weights() == pytest.approx({"0.0": 0.5, "0.1": 0.5})
    assert states[2].weights() == pytest.approx({"0.0": 0.5, "1.0": 0.5})


def test_ring_model_stops_at_its_budget():
    model = qubit_chain_shift(4, 2)
    init = CQState.point("0.0", np.kron(pure_state([1, 1]), basis_projector(2, 0)))
    sample_trajectories(model, init, 2, 10, seed=0)
    with pytest.raises(HorizonError):
        sample_trajectories(model, init, 3, 10, seed=0)
    with pytest.raises(HorizonError):
        evolve(model, init, 3)


def test_ring_model_parameters_are_checked():
    with pytest.raises(ParameterError):
        ring_shift_model(2, 3, 3)
    with pytest.raises(ParameterError):
        ring_shift_model(1, 3, 1)
    with pytest.raises(ParameterError):
        qubit_chain_shift(1)


def test_qubit_chain_defaults_to_half_classical():
    assert qubit_chain_shift(6).step_budget == 3


def test_autonomous_model_inverts_the_label_map():
    model = autonomous_model({"a": "b", "b": "a"}, {"a": HADAMARD, "b": np.eye(2)})
    assert model.f == {"b": "a", "a": "b"}
    np.testing.assert_allclose(model.blocks["b"], HADAMARD)
    assert model.structure == {"kind": "autonomous"}


def test_autonomous_model_rejects_non_bijections():
    with pytest.raises(FiniteBranchingError):
        autonomous_model({"a": "b", "b": "b"}, {"a": np.eye(2), "b": np.eye(2)})


def test_autonomous_model_checks_its_blocks():
    with pytest.raises(ParameterError):
        autonomous_model({"a": "a"}, {})
    with pytest.raises(ParameterError):
        autonomous_model({"a": "a"}, {"a": np.diag([1.0, 2.0])})


def test_cycle_model_labels():
    model = cycle_model([np.eye(3)] * 4)
    assert model.labels == ("0", "1", "2", "3")
    assert model.f == {"1": "0", "2": "1", "3": "2", "0": "3"}
    with pytest.raises(ParameterError):
        cycle_model([])


def test_random_models_validate(rng):
    for _ in range(20):
        strict = random_autonomous_model(4, 2, rng)
        assert strict.report.compatible
        kraus = random_kraus_model(4, 2, rng)
        assert kraus.report.compatible
        state = random_cq_state(kraus, rng)
        assert sum(state.weights().values()) == pytest.approx(1.0)


def test_ring_window_keeps_blank_oldest_cell():
    w = ring_window(2, 2, 4)
    assert w.live_labels == frozenset({"0.0", "0.1"})
    assert w.step_budget == 2
    np.testing.assert_allclose(w.live_projector, np.diag([1.0, 0.0, 1.0, 0.0]))
