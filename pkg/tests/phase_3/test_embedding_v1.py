import numpy as np
import pytest

from phase_1.core.errors_v1 import KrausError, ParameterError
from phase_1.core.matcore_v1 import unitarity_residual
from phase_2.eventum.evolution_v1 import evolve
from phase_2.eventum.trajectories_v1 import backward_history, sample_trajectories
from phase_3.embed.embedding_v1 import (
    assemble,
    blank_label,
    build_copy,
    build_dilation,
    build_gated_step,
    build_shift,
    initial_state,
    outcome_record,
    system_state,
)
from phase_3.embed.kraus_v1 import (
    ChainLayout,
    KrausFamily,
    amplitude_damping_kraus,
    kraus_residual,
    projective_kraus,
    random_kraus_family,
)

CNOT = np.eye(4)[[0, 1, 3, 2]]
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=np.complex128)


def test_kraus_family_checks_completeness():
    with pytest.raises(KrausError) as info:
        KrausFamily(2, (np.sqrt(0.9) * np.eye(2),))
    assert info.value.residual == pytest.approx(0.1 * np.sqrt(2))
    assert "residual=0.141" in str(info.value)
    with pytest.raises(KrausError):
        KrausFamily(2, ())


def test_kraus_residual_of_valid_families(rng):
    assert kraus_residual(projective_kraus(3).ops) < 1e-14
    assert kraus_residual(amplitude_damping_kraus(0.3).ops) < 1e-14
    assert kraus_residual(random_kraus_family(2, 3, rng).ops) < 1e-10
    with pytest.raises(ParameterError):
        amplitude_damping_kraus(1.5)


def test_kraus_family_outcome_statistics():
    k = projective_kraus(2)
    assert list(k.outcomes) == [1, 2]
    np.testing.assert_allclose(k.probabilities(PLUS), [0.5, 0.5])
    posts = k.posterior_states(np.diag([1.0, 0.0]))
    assert list(posts) == [1]
    np.testing.assert_allclose(k.channel(PLUS), np.eye(2) / 2)


def test_layout_indices():
    layout = ChainLayout(cell_dim=3, n_cells=4, n_classical=2)
    assert layout.n_quantum == 2
    assert layout.system_index == 2
    assert layout.apparatus_index == 3
    assert layout.ring_indices == [0, 1, 4, 5]
    assert layout.factor_dims(2) == [3, 3, 2, 3, 3, 3]
    assert layout.dim_l(2) == 2 * 27
    with pytest.raises(ParameterError):
        ChainLayout(cell_dim=3, n_cells=2, n_classical=2)


def test_dilation_of_projective_measurement():
    u = build_dilation(projective_kraus(2))
    assert unitarity_residual(u) < 1e-10
    # |j>|0> -> |j>|j+1>
    np.testing.assert_allclose(u[:, 0], np.eye(6)[:, 1], atol=1e-12)
    np.testing.assert_allclose(u[:, 3], np.eye(6)[:, 5], atol=1e-12)


def test_dilation_of_amplitude_damping():
    g = 0.36
    u = build_dilation(amplitude_damping_kraus(g))
    assert unitarity_residual(u) < 1e-10
    expected = np.zeros(6)
    expected[4] = np.sqrt(1 - g)  # |1>|1>
    expected[2] = np.sqrt(g)  # |0>|2>
    np.testing.assert_allclose(u[:, 3], expected, atol=1e-12)


def test_copy_of_single_outcome_is_cnot():
    np.testing.assert_array_equal(build_copy(1), CNOT)


def test_copy_rejects_mismatched_layout():
    with pytest.raises(ParameterError):
        build_copy(2, ChainLayout(cell_dim=2, n_cells=3, n_classical=1))


def test_shift_cycles_back_after_every_cell():
    layout = ChainLayout(cell_dim=3, n_cells=3, n_classical=1)
    np.testing.assert_allclose(np.linalg.matrix_power(build_shift(layout), 3), np.eye(27))


def test_gated_step_measures_only_blank_inputs():
    k = projective_kraus(2)
    g = build_gated_step(k)
    assert unitarity_residual(g) < 1e-10
    cell = 3

    def index(s, a, z):
        return (s * cell + a) * cell + z

    np.testing.assert_allclose(g[:, index(1, 0, 0)], np.eye(18)[:, index(1, 2, 2)], atol=1e-12)
    np.testing.assert_allclose(g[:, index(0, 2, 0)], np.eye(18)[:, index(0, 2, 0)], atol=1e-12)


@pytest.mark.parametrize("gated", [False, True])
def test_assembled_chain_is_a_strict_world(gated):
    k = amplitude_damping_kraus(0.4)
    layout = ChainLayout.for_family(k, 3, 1)
    model, u = assemble(k, layout, gated=gated)
    assert model.report.compatible
    assert model.step_budget == 1
    assert model.structure["kind"] == "cp_embedding"
    assert model.provenance["params"]["gated"] is gated
    assert unitarity_residual(u) < 1e-10
    assert model.f == {"0": "0", "1": "0", "2": "0"}


def test_assemble_checks_the_layout():
    k = projective_kraus(2)
    with pytest.raises(ParameterError):
        assemble(k, ChainLayout(cell_dim=2, n_cells=3, n_classical=1))
    with pytest.raises(ParameterError):
        assemble(k, ChainLayout.for_family(k, 3, 1), max_dim=64)


def test_initial_state_is_blank():
    k = projective_kraus(2)
    layout = ChainLayout.for_family(k, 3, 2)
    init = initial_state(k, layout, PLUS)
    assert init.labels == [blank_label(layout)] == ["0.0"]
    np.testing.assert_allclose(system_state(init.branches[0].dm, k, layout), PLUS, atol=1e-12)


def test_gated_chain_slides_the_record():
    k = projective_kraus(2)
    layout = ChainLayout.for_family(k, 3, 2)
    model, _ = assemble(k, layout, gated=True)
    init = initial_state(k, layout, PLUS)
    states = evolve(model, init, 2)
    assert states[1].weights() == pytest.approx({"0.1": 0.5, "0.2": 0.5})
    assert states[2].weights() == pytest.approx({"1.0": 0.5, "2.0": 0.5})
    for br in states[2].branches:
        x = outcome_record(br.label)[0]
        expected = np.diag([1.0, 0.0]) if x == 1 else np.diag([0.0, 1.0])
        np.testing.assert_allclose(system_state(br.dm, k, layout), expected, atol=1e-12)

    for tr in sample_trajectories(model, init, 2, 20, seed=4):
        x = outcome_record(tr.labels[-1])[0]
        assert tr.labels == ("0.0", f"0.{x}", f"{x}.0")
        assert backward_history(model, tr.labels[-1], 2) == ["0.0", f"0.{x}", f"{x}.0"][::-1]


def test_outcome_record():
    assert outcome_record("0.2.1") == [0, 2, 1]
