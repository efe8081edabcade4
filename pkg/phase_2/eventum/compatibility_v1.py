"""
Compatibility of a raw unitary with the classical pair (X, f).

check_compatibility recovers f from the block pattern, evaluates the block
conditions and the two algebra inclusions

    U 𝒞 U* ⊆ 𝒞      beables (diagonal ⊗ I) are mapped into beables
    U* 𝒜 U ⊆ 𝒜      predictables (diagonal ⊗ B(L)) are mapped into predictables

Both inclusions are tested on generators. Under a window the beable direction
pushes only live generators and tests them against span{δ_x ⊗ P_live}; the
predictable direction is restricted to live columns.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from phase_1.algebra.vnalg_v1 import AlgebraBasis, membership, pinched_membership
from phase_1.core.errors_v1 import CompatibilityError, ModeError, ShapeError, UnitarityError
from phase_1.core.matcore_v1 import CMat, basis_projector, dagger, uniform_partition, unitarity_residual
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES
from phase_2.eventum.blocks_v1 import (
    STRICT,
    CompatibilityReport,
    check_block_conditions,
    extract_blocks,
    infer_f,
)
from phase_2.eventum.model_v1 import EventumModel, Window


def _weyl_generators(dim: int) -> list[CMat]:
    """Clock and shift; together they generate B(C^dim)."""
    if dim == 1:
        return []
    omega = np.exp(2j * np.pi / dim)
    clock = np.diag(omega ** np.arange(dim))
    shift = np.roll(np.eye(dim, dtype=np.complex128), 1, axis=0)
    return [clock, shift]


def _live_column_projector(n: int, dim_l: int, live: Sequence[int]) -> CMat:
    diag = np.zeros(n, dtype=np.complex128)
    diag[list(live)] = 1.0
    return np.kron(np.diag(diag), np.eye(dim_l, dtype=np.complex128))


def inclusion_residuals(u: CMat, num_labels: int, dim_l: int, window: Window | None = None, labels: Sequence | None = None) -> tuple[float, float]:
    """
    (beable residual, predictable residual) of U on ℓ²(X) ⊗ L.
    """
    labels = list(range(num_labels)) if labels is None else list(labels)
    eye_l = np.eye(dim_l, dtype=np.complex128)
    if window is None:
        live = list(range(num_labels))
        p_live = eye_l
    else:
        live = [i for i, x in enumerate(labels) if x in window.live_labels]
        p_live = window.live_projector

    q = _live_column_projector(num_labels, dim_l, live)
    rank = max(int(round(float(np.real(np.trace(p_live))))), 1)
    beables = AlgebraBasis(
        dim=num_labels * dim_l,
        basis=np.stack([np.kron(basis_projector(num_labels, x), p_live) / np.sqrt(rank) for x in range(num_labels)]),
    )

    beable = 0.0
    u_live = u @ q
    for y in live:
        g = np.kron(basis_projector(num_labels, y), eye_l)
        image = u @ g @ dagger(u)
        beable = max(beable, membership(image, beables))

    partition = uniform_partition(labels, dim_l)
    gens = [np.kron(basis_projector(num_labels, x), eye_l) for x in range(num_labels)]
    gens += [np.kron(np.eye(num_labels, dtype=np.complex128), w) for w in _weyl_generators(dim_l)]
    predictable = 0.0
    for g in gens:
        pulled = dagger(u_live) @ g @ u_live
        predictable = max(predictable, pinched_membership(pulled, partition))
    return float(beable), float(predictable)


def check_compatibility(
    u: CMat,
    num_labels: int,
    dim_l: int,
    labels: Sequence | None = None,
    window: Window | None = None,
    tol: float = DEFAULT_TOLERANCES["compatibility"],
    zero_tol: float = DEFAULT_TOLERANCES["block_zero"],
) -> CompatibilityReport:
    """
    Strict compatibility verdict for a raw unitary, with evidence.

    labels name the rows (default 0..n-1). A non-unitary input raises
    UnitarityError; every other failure is reported, not raised.
    """
    labels = list(range(num_labels)) if labels is None else list(labels)
    if len(labels) != num_labels:
        raise ShapeError(f"{len(labels)} labels given for {num_labels} label sectors")
    blocks = extract_blocks(u, num_labels, dim_l)
    live_idx = None
    if window is not None:
        live_idx = [i for i, x in enumerate(labels) if x in window.live_labels]
    pattern = infer_f(blocks, tol=zero_tol, live_columns=live_idx)

    if pattern.f is None:
        violations = []
        for x in pattern.rows_without:
            violations.append(f"row {labels[x]!r} has no nonzero block")
        for x, cols in pattern.rows_with_many.items():
            violations.append(f"row {labels[x]!r} has {len(cols)} nonzero blocks at {[labels[c] for c in cols]}")
        beable, predictable = inclusion_residuals(u, num_labels, dim_l, window, labels)
        return CompatibilityReport(
            compatible=False,
            f_map=None,
            residual_row_uniqueness=pattern.residual_row_uniqueness,
            residual_completeness=float("nan"),
            residual_coisometry=float("nan"),
            residual_orthogonality=float("nan"),
            violations=violations,
            violating_rows=[labels[x] for x in pattern.rows_without] + [labels[x] for x in pattern.rows_with_many],
            beable_inclusion=beable,
            predictable_inclusion=predictable,
        )

    f_map = {labels[x]: labels[y] for x, y in pattern.f.items()}
    block_map = {labels[x]: blocks[x, y] for x, y in pattern.f.items()}
    report = check_block_conditions(
        labels,
        f_map,
        block_map,
        dim_l,
        mode=STRICT,
        live_labels=None if window is None else [labels[i] for i in live_idx],
        live_projector=None if window is None else window.live_projector,
        tol=tol,
        residual_row_uniqueness=pattern.residual_row_uniqueness,
    )
    report.beable_inclusion, report.predictable_inclusion = inclusion_residuals(u, num_labels, dim_l, window, labels)
    if max(report.beable_inclusion, report.predictable_inclusion) >= tol:
        report.violations.append(
            f"algebra inclusions fail (beables {report.beable_inclusion:.3g}, predictables {report.predictable_inclusion:.3g})"
        )
        report.compatible = False
    return report


def reconstruct_u(model: EventumModel, tol: float = DEFAULT_TOLERANCES["solved"]) -> CMat:
    """
    Assemble U from the blocks of a fully materialized strict model.
    """
    if model.mode != STRICT:
        raise ModeError("only strict-mode models define a unitary; kraus-mode blocks are a channel")
    if model.window is not None:
        raise ModeError("windowed models are truncations; use model.unitary instead of reassembling the blocks")
    n, d = model.num_labels, model.dim_l
    u = np.zeros((n * d, n * d), dtype=np.complex128)
    for x, block in model.blocks.items():
        i = model.label_index[x]
        j = model.label_index[model.f[x]]
        u[i * d:(i + 1) * d, j * d:(j + 1) * d] = block
    dev = unitarity_residual(u)
    if dev > tol:
        raise UnitarityError(f"reassembled blocks are not unitary: {dev:.3g}")
    return u


def model_from_unitary(
    u: CMat,
    labels: Sequence,
    dim_l: int,
    window: Window | None = None,
    structure: dict | None = None,
    provenance: dict | None = None,
    tol: float = DEFAULT_TOLERANCES["compatibility"],
) -> EventumModel:
    """
    Strict model read off a compatible unitary. Raises CompatibilityError with the report otherwise.
    """
    labels = list(labels)
    report = check_compatibility(u, len(labels), dim_l, labels=labels, window=window, tol=tol)
    if not report.compatible:
        raise CompatibilityError("unitary is not compatible with the classical labels", report)
    blocks = extract_blocks(u, len(labels), dim_l)
    index = {x: i for i, x in enumerate(labels)}
    block_map = {x: blocks[index[x], index[y]] for x, y in report.f_map.items()}
    model = EventumModel(
        labels=tuple(labels),
        dim_l=dim_l,
        f=report.f_map,
        blocks=block_map,
        mode=STRICT,
        window=window,
        unitary=np.asarray(u, dtype=np.complex128),
        structure=structure,
        provenance=provenance,
        tol=tol,
    )
    model.report.beable_inclusion = report.beable_inclusion
    model.report.predictable_inclusion = report.predictable_inclusion
    return model
