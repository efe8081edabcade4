import numpy as np
import pytest

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=np.complex128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def hadamard():
    return HADAMARD.copy()


@pytest.fixture
def plus_state():
    return PLUS.copy()
