"""
Kraus families and the cell layout of the measurement chain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from phase_1.core.errors_v1 import KrausError, ParameterError
from phase_1.core.matcore_v1 import CMat, basis_projector, dagger, haar_unitary, require_density_matrix, require_square, residual
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES


def kraus_residual(ops: Sequence[CMat]) -> float:
    """||sum A*A - I||."""
    dim = ops[0].shape[0]
    total = sum(dagger(a) @ a for a in ops)
    return residual(total - np.eye(dim, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class KrausFamily:
    """
    Outcome-indexed Kraus operators A_1..A_m on C^dim_s. Outcome 0 is reserved
    for the blank apparatus value.
    """

    dim_s: int
    ops: tuple
    tol: float = DEFAULT_TOLERANCES["solved"]

    def __post_init__(self):
        if len(self.ops) == 0:
            raise KrausError("a Kraus family needs at least one operator", residual=float(np.sqrt(self.dim_s)))
        ops = tuple(require_square(a, self.dim_s, f"Kraus operator {i + 1}") for i, a in enumerate(self.ops))
        object.__setattr__(self, "ops", ops)
        r = kraus_residual(ops)
        if r > self.tol:
            raise KrausError("Kraus operators do not satisfy sum A*A = I", residual=r)

    @property
    def m(self) -> int:
        return len(self.ops)

    @property
    def outcomes(self) -> range:
        return range(1, self.m + 1)

    def op(self, outcome: int) -> CMat:
        return self.ops[outcome - 1]

    def probabilities(self, rho: CMat) -> np.ndarray:
        rho = require_density_matrix(rho, self.dim_s, name="system state")
        return np.array([float(np.real(np.trace(rho @ dagger(a) @ a))) for a in self.ops])

    def posterior_states(self, rho: CMat, prune: float = DEFAULT_TOLERANCES["branch_prune"]) -> dict[int, CMat]:
        """Outcome -> A ρ A* / p for outcomes with p above prune."""
        out = {}
        for x in self.outcomes:
            a = self.op(x)
            sigma = a @ rho @ dagger(a)
            p = float(np.real(np.trace(sigma)))
            if p >= prune:
                out[x] = sigma / p
        return out

    def channel(self, rho: CMat) -> CMat:
        return sum(a @ rho @ dagger(a) for a in self.ops)


def projective_kraus(dim_s: int) -> KrausFamily:
    return KrausFamily(dim_s, tuple(basis_projector(dim_s, i) for i in range(dim_s)))


def amplitude_damping_kraus(gamma: float) -> KrausFamily:
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    a1 = np.diag([1.0, np.sqrt(1.0 - gamma)]).astype(np.complex128)
    a2 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128)
    return KrausFamily(2, (a1, a2))


def random_kraus_family(dim_s: int, m: int, rng: np.random.Generator) -> KrausFamily:
    """Blocks of a Haar-random isometry C^dim_s -> C^(m·dim_s)."""
    iso = haar_unitary(m * dim_s, rng)[:, :dim_s]
    return KrausFamily(dim_s, tuple(iso[i * dim_s:(i + 1) * dim_s, :] for i in range(m)))


@dataclass(frozen=True)
class ChainLayout:
    """
    Register order [classical cells (oldest first), S, A, quantum cells].
    The ring runs through the classical cells and then the quantum cells.
    """

    cell_dim: int
    n_cells: int
    n_classical: int

    def __post_init__(self):
        if self.cell_dim < 2:
            raise ParameterError(f"cells need dimension at least 2, got {self.cell_dim}")
        if not 1 <= self.n_classical < self.n_cells:
            raise ParameterError(f"need 1 <= n_classical < n_cells, got {self.n_classical} of {self.n_cells}")

    @classmethod
    def for_family(cls, family: KrausFamily, n_cells: int, n_classical: int) -> "ChainLayout":
        return cls(cell_dim=family.m + 1, n_cells=n_cells, n_classical=n_classical)

    @property
    def n_quantum(self) -> int:
        return self.n_cells - self.n_classical

    @property
    def system_index(self) -> int:
        return self.n_classical

    @property
    def apparatus_index(self) -> int:
        return self.n_classical + 1

    @property
    def ring_indices(self) -> list[int]:
        return list(range(self.n_classical)) + list(range(self.n_classical + 2, self.n_cells + 2))

    @property
    def first_quantum_index(self) -> int:
        return self.n_classical + 2

    @property
    def step_budget(self) -> int:
        return self.n_classical

    def factor_dims(self, dim_s: int) -> list[int]:
        return [self.cell_dim] * self.n_classical + [dim_s, self.cell_dim] + [self.cell_dim] * self.n_quantum

    def dim_l(self, dim_s: int) -> int:
        return dim_s * self.cell_dim ** (1 + self.n_quantum)
