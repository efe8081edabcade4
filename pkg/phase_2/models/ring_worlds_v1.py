"""
Ring of identical cells rotated one position per step.

Cells are ordered classical (oldest first) then quantum. One step moves the
content of every cell one position toward the past; the oldest classical cell
wraps around into the last quantum cell. The classical cells therefore hold a
sliding record of the last n_classical values that left quantum cell 0.

The finite ring is a truncation of the infinite chain: only labels whose oldest
cell is 0 have materialized successors, and the wrapped cell must start in |0>.
"""

from __future__ import annotations

import itertools

import numpy as np

from phase_1.core.errors_v1 import ParameterError
from phase_1.core.matcore_v1 import CMat, basis_projector
from phase_1.core.settings_v1 import MAX_DIM
from phase_2.eventum.compatibility_v1 import model_from_unitary
from phase_2.eventum.model_v1 import EventumModel, Window, history_label, history_symbols

BLANK = "0"


def ring_labels(cell_dim: int, n_classical: int) -> list[str]:
    return [history_label(word) for word in itertools.product(range(cell_dim), repeat=n_classical)]


def ring_shift_permutation(cell_dim: int, n_cells: int, max_dim: int = MAX_DIM) -> CMat:
    """
    Permutation |c_0 c_1 ... c_{n-1}> -> |c_1 ... c_{n-1} c_0> on (C^cell_dim)^{⊗n}.
    """
    dim = cell_dim ** n_cells
    if dim > max_dim:
        raise ParameterError(f"ring of {n_cells} cells of dimension {cell_dim} exceeds the cap {max_dim}")
    idx = np.arange(dim)
    digits = np.stack(np.unravel_index(idx, (cell_dim,) * n_cells))
    rotated = np.roll(digits, -1, axis=0)
    out_idx = np.ravel_multi_index(tuple(rotated), (cell_dim,) * n_cells)
    perm = np.zeros((dim, dim), dtype=np.complex128)
    perm[out_idx, idx] = 1.0
    return perm


def ring_window(cell_dim: int, n_classical: int, dim_l: int, labels: list[str] | None = None) -> Window:
    labels = ring_labels(cell_dim, n_classical) if labels is None else labels
    live = frozenset(x for x in labels if history_symbols(x)[0] == BLANK)
    projector = np.kron(np.eye(dim_l // cell_dim, dtype=np.complex128), basis_projector(cell_dim, 0))
    return Window(live_labels=live, live_projector=projector, step_budget=n_classical)


def ring_shift_model(cell_dim: int, n_cells: int, n_classical: int) -> EventumModel:
    if cell_dim < 2:
        raise ParameterError(f"cells need dimension at least 2, got {cell_dim}")
    if not 1 <= n_classical < n_cells:
        raise ParameterError(f"need 1 <= n_classical < n_cells, got {n_classical} of {n_cells}")
    u = ring_shift_permutation(cell_dim, n_cells)
    labels = ring_labels(cell_dim, n_classical)
    dim_l = cell_dim ** (n_cells - n_classical)
    return model_from_unitary(
        u,
        labels,
        dim_l,
        window=ring_window(cell_dim, n_classical, dim_l, labels),
        structure={"kind": "shift", "cell_dim": cell_dim, "n_cells": n_cells, "n_classical": n_classical},
        provenance={
            "constructor": "ring_shift_model",
            "params": {"cell_dim": cell_dim, "n_cells": n_cells, "n_classical": n_classical},
        },
    )


def qubit_chain_shift(n_cells: int, n_classical: int | None = None) -> EventumModel:
    """
    Qubit ring; the classical record defaults to the first half of the cells.
    """
    if n_cells < 2:
        raise ParameterError(f"a qubit chain needs at least 2 cells, got {n_cells}")
    n_classical = n_cells // 2 if n_classical is None else n_classical
    return ring_shift_model(2, n_cells, n_classical)

