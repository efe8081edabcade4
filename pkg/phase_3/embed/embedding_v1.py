"""
Measurement chain for a Kraus family.

One step of the chain is

    dilation   |ψ>_S |0>_A  ->  sum_x A_x|ψ>_S |x>_A
    copy       |x>_A |z>_0  ->  |x>_A |z + x mod (m+1)>_0
    shift      ring rotation: quantum cell 0 enters the classical record

and the composite U = shift · copy · dilation is a strict eventum world on the
finite ring for n_classical steps. The gated variant performs dilation and copy
only while the apparatus reads 0, so the system is measured once and the record
then slides deeper into the classical cells.
"""

from __future__ import annotations

import numpy as np

from phase_1.core.errors_v1 import ParameterError
from phase_1.core.matcore_v1 import (
    CMat,
    basis_projector,
    expand_operator,
    isometry_to_unitary,
    reduce_density,
    tensor_all,
)
from phase_1.core.settings_v1 import MAX_DIM
from phase_2.eventum.compatibility_v1 import model_from_unitary
from phase_2.eventum.model_v1 import CQState, EventumModel, history_label, history_symbols
from phase_2.models.ring_worlds_v1 import ring_labels, ring_shift_permutation, ring_window
from phase_3.embed.kraus_v1 import ChainLayout, KrausFamily

EMBEDDING_KIND = "cp_embedding"


def build_dilation(k: KrausFamily) -> CMat:
    """
    Unitary on S ⊗ A whose columns |j>|0> are sum_x A_x|j> ⊗ |x>.
    """
    d, cell = k.dim_s, k.m + 1
    columns = {}
    for j in range(d):
        col = np.zeros(d * cell, dtype=np.complex128)
        for x in k.outcomes:
            col[np.arange(d) * cell + x] = k.op(x)[:, j]
        columns[j * cell] = col
    return isometry_to_unitary(columns, d * cell)


def build_copy(m: int, layout: ChainLayout | None = None) -> CMat:
    """
    Permutation |x, z> -> |x, z + x mod (m+1)> on apparatus ⊗ quantum cell 0.
    """
    cell = m + 1
    if layout is not None and layout.cell_dim != cell:
        raise ParameterError(f"layout cells have dimension {layout.cell_dim}, outcomes need {cell}")
    perm = np.zeros((cell * cell, cell * cell), dtype=np.complex128)
    for x in range(cell):
        for z in range(cell):
            perm[x * cell + (z + x) % cell, x * cell + z] = 1.0
    return perm


def build_gated_step(k: KrausFamily) -> CMat:
    """
    Unitary on S ⊗ A ⊗ cell 0: measure-and-copy when A and the cell are blank,
    identity on the other blank-cell inputs.
    """
    d, cell = k.dim_s, k.m + 1
    dim = d * cell * cell

    def index(s, a, z):
        return (s * cell + a) * cell + z

    columns = {}
    for j in range(d):
        col = np.zeros(dim, dtype=np.complex128)
        for x in k.outcomes:
            col[[index(s, x, x) for s in range(d)]] = k.op(x)[:, j]
        columns[index(j, 0, 0)] = col
        for a in range(1, cell):
            col = np.zeros(dim, dtype=np.complex128)
            col[index(j, a, 0)] = 1.0
            columns[index(j, a, 0)] = col
    return isometry_to_unitary(columns, dim)


def build_shift(layout: ChainLayout) -> CMat:
    return ring_shift_permutation(layout.cell_dim, layout.n_cells)


def assemble(k: KrausFamily, layout: ChainLayout, gated: bool = False, max_dim: int = MAX_DIM) -> tuple[EventumModel, CMat]:
    """
    Composite unitary of one chain step and its strict eventum view.

    Labels are the classical-cell words (oldest first); the model's window keeps
    n_classical steps inside the finite ring.
    """
    if layout.cell_dim != k.m + 1:
        raise ParameterError(f"layout cells have dimension {layout.cell_dim}, the family has {k.m} outcomes")
    dims = layout.factor_dims(k.dim_s)
    total = int(np.prod(dims))
    if total > max_dim:
        raise ParameterError(f"composite space has dimension {total}, above the cap {max_dim}")

    shift = expand_operator(build_shift(layout), dims, layout.ring_indices, max_dim=max_dim)
    if gated:
        targets = [layout.system_index, layout.apparatus_index, layout.first_quantum_index]
        step = expand_operator(build_gated_step(k), dims, targets, max_dim=max_dim)
    else:
        dil = expand_operator(build_dilation(k), dims, [layout.system_index, layout.apparatus_index], max_dim=max_dim)
        copy = expand_operator(build_copy(k.m, layout), dims, [layout.apparatus_index, layout.first_quantum_index], max_dim=max_dim)
        step = copy @ dil
    u = shift @ step

    labels = ring_labels(layout.cell_dim, layout.n_classical)
    dim_l = layout.dim_l(k.dim_s)
    model = model_from_unitary(
        u,
        labels,
        dim_l,
        window=ring_window(layout.cell_dim, layout.n_classical, dim_l, labels),
        structure={
            "kind": EMBEDDING_KIND,
            "cell_dim": layout.cell_dim,
            "n_cells": layout.n_cells,
            "n_classical": layout.n_classical,
            "dim_s": k.dim_s,
        },
        provenance={
            "constructor": "assemble",
            "params": {"dim_s": k.dim_s, "m": k.m, "n_cells": layout.n_cells, "n_classical": layout.n_classical, "gated": bool(gated)},
        },
    )
    return model, u


def blank_label(layout: ChainLayout) -> str:
    return history_label(["0"] * layout.n_classical)


def initial_state(k: KrausFamily, layout: ChainLayout, rho: CMat) -> CQState:
    """
    Blank record, blank apparatus and environment, system in rho.
    """
    cell = layout.cell_dim
    blank = [basis_projector(cell, 0)] * (1 + layout.n_quantum)
    sigma = tensor_all([np.asarray(rho, dtype=np.complex128)] + blank)
    return CQState.point(blank_label(layout), sigma)


def system_state(dm_l: CMat, k: KrausFamily, layout: ChainLayout) -> CMat:
    """Reduce a state on L = S ⊗ A ⊗ quantum cells to S."""
    dims = [k.dim_s] + [layout.cell_dim] * (1 + layout.n_quantum)
    return reduce_density(dm_l, dims, [0])


def outcome_record(label: str) -> list[int]:
    """Classical-cell contents, oldest first."""
    return [int(s) for s in history_symbols(label)]
