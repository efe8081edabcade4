"""
Finite-dimensional von Neumann algebras.

An algebra is stored as a trace-orthonormal basis of its span, so "m ∈ A" is a
projection residual and "A ⊆ B" is the largest residual of A's basis against B.

Commutants are nullspaces of the stacked commutator system. With row-major
vectorization vec(A X B) = (A ⊗ B^T) vec(X), so

    X G - G X = 0   <=>   (I ⊗ G^T - G ⊗ I) vec(X) = 0

and the same rows are stacked for G*. Singular values below the nullspace
tolerance define the solution space. Every generator set is augmented with
adjoints, which makes the commutant a unital *-algebra automatically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from phase_1.core.errors_v1 import ShapeError
from phase_1.core.matcore_v1 import (
    BasisPartition,
    CMat,
    basis_projector,
    dagger,
    pinch,
    require_square,
    residual,
)
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES, MAX_DIM


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """
    Orthonormal (trace inner product) basis of a unital *-closed operator space.
    basis has shape (k, dim, dim).
    """

    dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.basis.ndim != 3 or self.basis.shape[1:] != (self.dim, self.dim):
            raise ShapeError(f"basis must have shape (k, {self.dim}, {self.dim}), got {self.basis.shape}")

    @property
    def size(self) -> int:
        """Dimension of the algebra as a complex vector space."""
        return int(self.basis.shape[0])

    def __len__(self) -> int:
        return self.size


def _stack(mats: Sequence[CMat], dim: int) -> np.ndarray:
    if len(mats) == 0:
        return np.zeros((0, dim, dim), dtype=np.complex128)
    return np.stack([np.asarray(m, dtype=np.complex128) for m in mats])


def _nullspace_rows(system: np.ndarray, tol: float) -> np.ndarray:
    """
    Orthonormal basis (as rows) of {v : system @ v = 0}.
    """
    n = system.shape[1]
    if system.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, vh = np.linalg.svd(system, full_matrices=True)
    rank = int(np.sum(s > tol))
    return np.conjugate(vh[rank:])


def algebra_from_span(mats: Sequence[CMat], dim: int, tol: float = DEFAULT_TOLERANCES["nullspace"]) -> AlgebraBasis:
    """
    Orthonormal basis of span(mats). No closure is applied.
    """
    if len(mats) == 0:
        return AlgebraBasis(dim=dim, basis=_stack([], dim))
    for i, m in enumerate(mats):
        require_square(m, dim, f"spanning matrix {i}")
    flat = _stack(mats, dim).reshape(len(mats), dim * dim).T
    u, s, _ = np.linalg.svd(flat, full_matrices=False)
    rank = int(np.sum(s > tol))
    basis = u[:, :rank].T.reshape(rank, dim, dim)
    return AlgebraBasis(dim=dim, basis=basis)


def full_algebra(dim: int) -> AlgebraBasis:
    """B(C^dim): matrix units E_ij."""
    basis = np.eye(dim * dim, dtype=np.complex128).reshape(dim * dim, dim, dim)
    return AlgebraBasis(dim=dim, basis=basis)


def diagonal_algebra(dim: int) -> AlgebraBasis:
    """Span of the projectors |x><x|."""
    return AlgebraBasis(dim=dim, basis=_stack([basis_projector(dim, x) for x in range(dim)], dim))


def scalar_algebra(dim: int) -> AlgebraBasis:
    """C·1."""
    return AlgebraBasis(dim=dim, basis=(np.eye(dim, dtype=np.complex128) / np.sqrt(dim))[None])


def commutant(generators: Sequence[CMat], dim: int, tol: float = DEFAULT_TOLERANCES["nullspace"], max_dim: int = MAX_DIM) -> AlgebraBasis:
    """
    Basis of {X : [X, G] = [X, G*] = 0 for every generator G}.
    An empty generator set gives the full matrix algebra.
    """
    if dim * dim > max_dim:
        raise ShapeError(f"commutant of a {dim}-dimensional space needs {dim * dim} unknowns, above the cap {max_dim}")
    gens = []
    for i, g in enumerate(generators):
        g = require_square(g, dim, f"generator {i}")
        gens.append(g)
        if residual(g - dagger(g)) > tol:
            gens.append(dagger(g))
    if not gens:
        return full_algebra(dim)

    eye = np.eye(dim, dtype=np.complex128)
    rows = [np.kron(eye, g.T) - np.kron(g, eye) for g in gens]
    null = _nullspace_rows(np.vstack(rows), tol)
    return AlgebraBasis(dim=dim, basis=null.reshape(-1, dim, dim))


def bicommutant(generators: Sequence[CMat], dim: int, tol: float = DEFAULT_TOLERANCES["nullspace"], max_dim: int = MAX_DIM) -> AlgebraBasis:
    """
    Commutant applied twice: the unital *-algebra generated by the generators.
    """
    first = commutant(generators, dim, tol=tol, max_dim=max_dim)
    return commutant(list(first.basis), dim, tol=tol, max_dim=max_dim)


def center(a: AlgebraBasis, tol: float = DEFAULT_TOLERANCES["nullspace"]) -> AlgebraBasis:
    """
    Basis of a ∩ a'.

    X = sum_k c_k B_k lies in a'  <=>  sum_k c_k [B_k, B_j] = 0 for every j,
    a linear system in the coefficients c. Orthonormal c give orthonormal X.
    """
    k = a.size
    if k == 0:
        return a
    cols = []
    for bk in a.basis:
        col = [(bk @ bj - bj @ bk).reshape(-1) for bj in a.basis]
        cols.append(np.concatenate(col))
    system = np.column_stack(cols)
    coeffs = _nullspace_rows(system, tol)
    basis = np.einsum("rk,kij->rij", coeffs, a.basis)
    return AlgebraBasis(dim=a.dim, basis=basis)


def membership(m: CMat, a: AlgebraBasis) -> float:
    """
    Frobenius distance from m to its orthogonal projection onto span(a); 0 means member.
    """
    m = require_square(m, a.dim, "tested matrix")
    if a.size == 0:
        return residual(m)
    coeffs = np.einsum("kij,ij->k", np.conjugate(a.basis), m)
    proj = np.einsum("k,kij->ij", coeffs, a.basis)
    return residual(m - proj)


def inclusion_residual(a: AlgebraBasis, b: AlgebraBasis) -> float:
    """
    Largest membership residual of a's basis in b (0 when a ⊆ b).
    """
    if a.dim != b.dim:
        raise ShapeError(f"algebras act on different dimensions ({a.dim} vs {b.dim})")
    if a.size == 0:
        return 0.0
    return max(membership(m, b) for m in a.basis)


def equal_algebras(a: AlgebraBasis, b: AlgebraBasis) -> float:
    """
    Mutual-membership residual; 0 when span(a) = span(b).
    """
    return max(inclusion_residual(a, b), inclusion_residual(b, a))


def pinched_membership(m: CMat, p: BasisPartition) -> float:
    """
    Membership residual in the block-diagonal algebra ⊕_x B(block_x).
    The orthogonal projection onto that algebra is exactly the pinch.
    """
    return residual(m - pinch(m, p))


def is_commutative(a: AlgebraBasis, tol: float = DEFAULT_TOLERANCES["solved"]) -> bool:
    for i in range(a.size):
        for j in range(i + 1, a.size):
            bi, bj = a.basis[i], a.basis[j]
            if residual(bi @ bj - bj @ bi) >= tol:
                return False
    return True


def tensor_algebra(a: AlgebraBasis, b: AlgebraBasis, max_dim: int = MAX_DIM) -> AlgebraBasis:
    """
    Basis {A_i ⊗ B_j}; Kronecker products of trace-orthonormal bases are trace-orthonormal.
    """
    dim = a.dim * b.dim
    if dim > max_dim:
        raise ShapeError(f"tensor algebra would act on dimension {dim}, above the cap {max_dim}")
    basis = np.einsum("aij,bkl->abikjl", a.basis, b.basis).reshape(a.size * b.size, dim, dim)
    return AlgebraBasis(dim=dim, basis=basis)
