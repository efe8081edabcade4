"""
Dense complex linear algebra shared by every other module.

Matrices are plain complex128 numpy arrays (CMat). Functions never modify their
inputs; every result is a fresh array.

Index convention for tensor products (numpy.kron):
    (a ⊗ b)[(i, k), (j, l)] = a[i, j] * b[k, l],   row index i * b.rows + k
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors_v1 import MatrixSizeError, NotAnIsometryError, ParameterError, ShapeError, StateError
from .settings_v1 import DEFAULT_TOLERANCES, MAX_DIM

CMat = np.ndarray

# Gram-Schmidt survivors with a smaller residual norm are treated as dependent.
_SURVIVOR_CUTOFF = 1e-6


def as_cmat(m, name: str = "matrix") -> CMat:
    """
    Coerce to a 2-D complex128 array with finite entries.
    """
    out = np.array(m, dtype=np.complex128)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ShapeError(f"{name} has non-finite entries")
    return out


def require_square(m: CMat, dim: int | None = None, name: str = "matrix") -> CMat:
    m = as_cmat(m, name)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ShapeError(f"{name} must be {dim}x{dim}, got shape {m.shape}")
    return m


def dagger(m: CMat) -> CMat:
    return np.conjugate(m).T


def residual(m: CMat) -> float:
    """
    Frobenius norm, used uniformly for every "= 0" test.
    """
    return float(np.linalg.norm(m))


def unitarity_residual(u: CMat) -> float:
    """
    ||U*U - I||_F
    """
    u = require_square(u, name="unitary")
    return residual(dagger(u) @ u - np.eye(u.shape[0]))


def _check_cap(rows: int, cols: int, max_dim: int) -> None:
    if rows > max_dim or cols > max_dim:
        raise MatrixSizeError(f"result would be {rows}x{cols}, above the dimension cap {max_dim}")


def tensor(a: CMat, b: CMat, max_dim: int = MAX_DIM) -> CMat:
    """
    Kronecker product a ⊗ b.
    """
    a = as_cmat(a, "a")
    b = as_cmat(b, "b")
    _check_cap(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1], max_dim)
    return np.kron(a, b)


def tensor_all(mats: Sequence[CMat], max_dim: int = MAX_DIM) -> CMat:
    out = as_cmat(mats[0])
    for m in mats[1:]:
        out = tensor(out, m, max_dim=max_dim)
    return out


def basis_projector(dim: int, index: int) -> CMat:
    """
    |index><index| on C^dim
    """
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[index, index] = 1.0
    return out


@dataclass(frozen=True)
class BasisPartition:
    """
    Sector decomposition of 0..total_dim into labelled contiguous index ranges.
    """

    total_dim: int
    blocks: tuple[tuple[Hashable, range], ...]

    def __post_init__(self):
        cursor = 0
        for label, idx in self.blocks:
            if idx.step != 1 or idx.start != cursor or idx.stop <= idx.start:
                raise ShapeError(f"block {label!r} with range {idx} does not continue the partition at {cursor}")
            cursor = idx.stop
        if cursor != self.total_dim:
            raise ShapeError(f"blocks cover 0..{cursor}, expected 0..{self.total_dim}")

    @property
    def labels(self) -> list:
        return [label for label, _ in self.blocks]


def uniform_partition(labels: Sequence[Hashable], block_dim: int) -> BasisPartition:
    """
    Partition with one block of size block_dim per label, in label order.
    """
    blocks = tuple((label, range(i * block_dim, (i + 1) * block_dim)) for i, label in enumerate(labels))
    return BasisPartition(total_dim=len(labels) * block_dim, blocks=blocks)


def pinch(m: CMat, p: BasisPartition) -> CMat:
    """
    sum_x Pi_x m Pi_x: zero every entry that connects two different blocks.
    """
    m = require_square(m, p.total_dim, "pinched matrix")
    out = np.zeros_like(m)
    for _, idx in p.blocks:
        out[idx.start:idx.stop, idx.start:idx.stop] = m[idx.start:idx.stop, idx.start:idx.stop]
    return out


def reduce_density(m: CMat, dims: Sequence[int], keep: Sequence[int]) -> CMat:
    """
    Partial trace over every factor not listed in keep (kept factors stay in order).
    """
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    m = require_square(m, total, "reduced matrix")
    n = len(dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"keep indices {keep} out of range for {n} factors")
    if 2 * n > len(string.ascii_letters):
        raise ShapeError(f"too many tensor factors ({n}) for a partial trace")

    letters = string.ascii_letters
    row = list(letters[:n])
    col = [letters[n + i] if i in keep else row[i] for i in range(n)]
    out_idx = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    expr = "".join(row) + "".join(col) + "->" + out_idx

    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    t = m.reshape(dims + dims)
    return np.einsum(expr, t).reshape(kept_dim, kept_dim)


def partial_trace(m: CMat, dims: tuple[int, int], keep: str = "first") -> CMat:
    """
    Partial trace on a bipartite space of dimensions (dA, dB).
    keep="first" returns the operator on A, keep="second" the one on B.
    """
    if keep not in ("first", "second"):
        raise ParameterError(f"keep must be 'first' or 'second', got {keep!r}")
    d_a, d_b = dims
    m = require_square(m, name="bipartite matrix")
    if m.shape[0] != d_a * d_b:
        raise ShapeError(f"matrix is {m.shape[0]}-dimensional, dims {dims} need {d_a * d_b}")
    return reduce_density(m, [d_a, d_b], [0] if keep == "first" else [1])


def expand_operator(op: CMat, dims: Sequence[int], targets: Sequence[int], max_dim: int = MAX_DIM) -> CMat:
    """
    Lift an operator acting on the factors `targets` (in the given order) to the
    full tensor space with factor dimensions `dims`; identity on the other factors.
    """
    dims = [int(d) for d in dims]
    n = len(dims)
    targets = list(targets)
    if len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise ShapeError(f"invalid target factors {targets} for {n} factors")
    d_t = int(np.prod([dims[t] for t in targets]))
    op = require_square(op, d_t, "expanded operator")
    total = int(np.prod(dims))
    _check_cap(total, total, max_dim)

    rest = [i for i in range(n) if i not in targets]
    order = targets + rest
    d_r = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(d_r, dtype=np.complex128))

    shape = [dims[i] for i in order]
    inv = list(np.argsort(order))
    full = full.reshape(shape + shape).transpose(inv + [n + j for j in inv])
    return full.reshape(total, total)


def complete_isometry(v: CMat, tol: float = DEFAULT_TOLERANCES["solved"]) -> CMat:
    """
    Extend an isometry to a square unitary.

    The first v.cols columns are v itself; the remaining columns come from
    Gram-Schmidt (two passes) on the standard basis in index order, keeping the
    first rows - cols survivors.
    """
    v = as_cmat(v, "isometry")
    rows, cols = v.shape
    if rows < cols:
        raise ShapeError(f"isometry needs rows >= cols, got shape {v.shape}")
    deviation = residual(dagger(v) @ v - np.eye(cols))
    if deviation > tol:
        raise NotAnIsometryError(f"columns are not orthonormal: ||V*V - I|| = {deviation:.3g}")

    u = np.zeros((rows, rows), dtype=np.complex128)
    u[:, :cols] = v
    filled = cols
    for i in range(rows):
        if filled == rows:
            break
        q = u[:, :filled]
        w = np.zeros(rows, dtype=np.complex128)
        w[i] = 1.0
        for _ in range(2):
            w = w - q @ (dagger(q) @ w)
        norm = np.linalg.norm(w)
        if norm > _SURVIVOR_CUTOFF:
            u[:, filled] = w / norm
            filled += 1

    if filled < rows:
        raise NotAnIsometryError(f"completion found only {filled - cols} of {rows - cols} columns")
    return u


def isometry_to_unitary(columns: Mapping[int, np.ndarray], dim: int, tol: float = DEFAULT_TOLERANCES["solved"]) -> CMat:
    """
    Unitary whose column j equals columns[j] for every prescribed j.

    The free columns are filled, in increasing index order, with the completion
    columns of complete_isometry applied to the prescribed columns (sorted by index).
    """
    fixed = sorted(columns)
    if any(j < 0 or j >= dim for j in fixed):
        raise ShapeError(f"prescribed column indices must lie in 0..{dim - 1}")
    v = np.column_stack([np.asarray(columns[j], dtype=np.complex128) for j in fixed]) if fixed else np.zeros((dim, 0))
    if v.shape[0] != dim:
        raise ShapeError(f"prescribed columns must have length {dim}, got {v.shape[0]}")
    if not fixed:
        return np.eye(dim, dtype=np.complex128)

    completed = complete_isometry(v, tol=tol)
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[:, fixed] = v
    free = [j for j in range(dim) if j not in columns]
    out[:, free] = completed[:, len(fixed):]
    return out


def trace_distance(a: CMat, b: CMat) -> float:
    """
    (1/2) ||a - b||_1 for Hermitian a, b.
    """
    diff = require_square(a, name="a") - require_square(b, name="b")
    herm = 0.5 * (diff + dagger(diff))
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(herm))))


def density_matrix_defects(m: CMat, tol: float = DEFAULT_TOLERANCES["psd"]) -> list[str]:
    """
    List the density-matrix invariants m violates (empty list when valid).
    """
    m = require_square(m, name="density matrix")
    problems = []
    herm = residual(m - dagger(m))
    if herm > tol:
        problems.append(f"not Hermitian (||m - m*|| = {herm:.3g})")
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + dagger(m)))))
    if min_eig < -tol:
        problems.append(f"not positive semidefinite (min eigenvalue {min_eig:.3g})")
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > tol:
        problems.append(f"trace {tr.real:.12g} differs from 1")
    return problems


def is_density_matrix(m: CMat, tol: float = DEFAULT_TOLERANCES["psd"]) -> bool:
    return not density_matrix_defects(m, tol)


def require_density_matrix(m: CMat, dim: int | None = None, tol: float = DEFAULT_TOLERANCES["psd"], name: str = "density matrix") -> CMat:
    m = require_square(m, dim, name)
    problems = density_matrix_defects(m, tol)
    if problems:
        raise StateError(f"{name}: " + "; ".join(problems))
    return m


def pure_state(psi) -> CMat:
    """
    |psi><psi| for a normalized copy of psi.
    """
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise StateError("cannot build a pure state from the zero vector")
    psi = psi / norm
    return np.outer(psi, np.conjugate(psi))


def haar_unitary(dim: int, rng: np.random.Generator) -> CMat:
    if dim == 1:
        phase = rng.uniform(0.0, 2.0 * np.pi)
        return np.array([[np.exp(1j * phase)]])
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=np.complex128)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> CMat:
    """
    Random density matrix G G* / trace with G a complex Gaussian dim x rank matrix.
    """
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho)
