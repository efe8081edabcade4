"""
Alternative eventum worlds on the same unitary.

A model with a cell structure (kind "shift") can be rotated: every cell gets the
same single-cell unitary w, and the world's classical basis becomes w|x>. The
rotated model describes the same U in the rotated coordinates and must pass the
compatibility check on its own.
"""

from __future__ import annotations

import numpy as np

from phase_1.algebra.vnalg_v1 import AlgebraBasis, inclusion_residual
from phase_1.core.errors_v1 import ShapeError, UnsupportedStructureError
from phase_1.core.matcore_v1 import CMat, basis_projector, dagger, require_square, tensor_all, unitarity_residual
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES
from phase_2.eventum.compatibility_v1 import model_from_unitary
from phase_2.eventum.model_v1 import EventumModel

SHIFT_KIND = "shift"


def _rotation(model: EventumModel) -> CMat | None:
    if not model.structure:
        return None
    rot = model.structure.get("rotation")
    return None if rot is None else np.asarray(rot, dtype=np.complex128)


def alternative_world(model: EventumModel, w: CMat) -> EventumModel:
    """
    Same dynamics, classical basis rotated by w on every cell.
    Raises CompatibilityError when the rotated pair fails the check.
    """
    structure = model.structure or {}
    if structure.get("kind") != SHIFT_KIND or model.unitary is None:
        raise UnsupportedStructureError("alternative worlds need a model built from a ring of identical cells")
    cell_dim = int(structure["cell_dim"])
    n_cells = int(structure["n_cells"])
    w = require_square(w, cell_dim, "cell rotation")
    if unitarity_residual(w) > DEFAULT_TOLERANCES["solved"]:
        raise ShapeError("cell rotation must be unitary")

    w_full = tensor_all([w] * n_cells)
    u_rot = dagger(w_full) @ model.unitary @ w_full
    previous = _rotation(model)
    total = w if previous is None else previous @ w
    return model_from_unitary(
        u_rot,
        model.labels,
        model.dim_l,
        window=model.window,
        structure={**structure, "rotation": total},
        provenance={"constructor": "alternative_world", "params": {"parent": model.provenance}},
        tol=model.tol,
    )


def beable_basis(model: EventumModel) -> AlgebraBasis:
    """
    Classical projectors of the model in ambient (unrotated) coordinates,
    normalized in the trace inner product.
    """
    n, d = model.num_labels, model.dim_l
    rot = _rotation(model)
    classical = tensor_all([rot] * int(model.structure["n_classical"])) if rot is not None else None
    eye_l = np.eye(d, dtype=np.complex128) / np.sqrt(d)
    mats = []
    for x in range(n):
        p = basis_projector(n, x)
        if classical is not None:
            p = classical @ p @ dagger(classical)
        mats.append(np.kron(p, eye_l))
    return AlgebraBasis(dim=n * d, basis=np.stack(mats))


def world_overlap(model_a: EventumModel, model_b: EventumModel) -> float:
    """
    Largest residual of a's beables against b's; 0 when the worlds share their facts.
    """
    return inclusion_residual(beable_basis(model_a), beable_basis(model_b))
