"""
Blockwise structure of a unitary on ℓ²(X) ⊗ L.

U_xy = (<x| ⊗ I) U (|y> ⊗ I). A unitary is compatible with the classical pair
when every row x has exactly one nonzero block, at y = f(x), and the blocks satisfy

    completeness   sum_{x: f(x)=y} U_xy* U_xy = I
    co-isometry    U_xy U_xy* = I
    orthogonality  U_xy U_x'y* = 0          for siblings x != x'

Under a finite window only live columns take part in the row analysis and the
co-isometry is measured against the live projector instead of I.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np
import pandas as pd

from phase_1.core.errors_v1 import ModeError, ShapeError, UnitarityError
from phase_1.core.matcore_v1 import CMat, dagger, require_square, residual, unitarity_residual
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES

STRICT = "strict"
KRAUS = "kraus"
MODES = (STRICT, KRAUS)

RESIDUAL_NAMES = (
    "residual_row_uniqueness",
    "residual_completeness",
    "residual_coisometry",
    "residual_orthogonality",
)


@dataclass
class CompatibilityReport:
    compatible: bool
    f_map: dict | None
    residual_row_uniqueness: float
    residual_completeness: float
    residual_coisometry: float
    residual_orthogonality: float
    violations: list[str] = field(default_factory=list)
    violating_rows: list = field(default_factory=list)
    beable_inclusion: float | None = None
    predictable_inclusion: float | None = None
    mode: str = STRICT

    def residuals(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in RESIDUAL_NAMES}

    def to_frame(self) -> pd.DataFrame:
        rows = [{"check": name, "residual": value} for name, value in self.residuals().items()]
        if self.beable_inclusion is not None:
            rows.append({"check": "beable_inclusion", "residual": self.beable_inclusion})
        if self.predictable_inclusion is not None:
            rows.append({"check": "predictable_inclusion", "residual": self.predictable_inclusion})
        return pd.DataFrame(rows)


@dataclass
class BlockPattern:
    """
    Nonzero pattern of a block matrix and the classical map it implies.
    f is None when some row has zero or several nonzero (live) blocks.
    """

    f: dict[int, int] | None
    nonzero: dict[int, list[int]]
    rows_without: list[int]
    rows_with_many: dict[int, list[int]]
    columns_without_preimage: list[int]
    residual_row_uniqueness: float

    @property
    def well_defined(self) -> bool:
        return self.f is not None and not self.columns_without_preimage


def extract_blocks(u: CMat, num_labels: int, dim_l: int, tol: float = DEFAULT_TOLERANCES["solved"]) -> np.ndarray:
    """
    All num_labels² blocks; blocks[x, y] is U_xy (dim_l x dim_l).
    """
    u = require_square(u, name="unitary")
    if u.shape[0] != num_labels * dim_l:
        raise ShapeError(f"unitary is {u.shape[0]}-dimensional, expected {num_labels} labels x {dim_l} = {num_labels * dim_l}")
    dev = unitarity_residual(u)
    if dev > tol:
        raise UnitarityError(f"input is not unitary: ||U*U - I|| = {dev:.3g}")
    return u.reshape(num_labels, dim_l, num_labels, dim_l).transpose(0, 2, 1, 3).copy()


def infer_f(blocks: np.ndarray, tol: float = DEFAULT_TOLERANCES["block_zero"], live_columns: Sequence[int] | None = None) -> BlockPattern:
    """
    Read the classical map off the nonzero block pattern.

    Row x maps to the unique live column y with ||U_xy|| > tol. Rows with no or
    several such columns, and live columns that no row maps to, are returned as
    evidence instead of raising.
    """
    n = blocks.shape[0]
    dim_l = blocks.shape[2]
    live = list(range(n)) if live_columns is None else sorted(live_columns)
    norms = np.linalg.norm(blocks, axis=(2, 3))

    nonzero = {}
    rows_without = []
    rows_with_many = {}
    worst = 0.0
    for x in range(n):
        row = norms[x, live]
        cols = [live[i] for i in np.flatnonzero(row > tol)]
        nonzero[x] = cols
        if not cols:
            rows_without.append(x)
            worst = max(worst, float(np.sqrt(dim_l)))
            continue
        if len(cols) > 1:
            rows_with_many[x] = cols
        ordered = np.sort(row)[::-1]
        worst = max(worst, float(np.sqrt(np.sum(ordered[1:] ** 2))))

    f = None
    if not rows_without and not rows_with_many:
        f = {x: cols[0] for x, cols in nonzero.items()}
    hit = set(f.values()) if f is not None else {c for cols in nonzero.values() for c in cols}
    columns_without_preimage = [y for y in live if y not in hit]

    return BlockPattern(
        f=f,
        nonzero=nonzero,
        rows_without=rows_without,
        rows_with_many=rows_with_many,
        columns_without_preimage=columns_without_preimage,
        residual_row_uniqueness=worst,
    )


def _predecessor_map(labels: Sequence[Hashable], f: Mapping) -> dict:
    preds = {}
    for x in labels:
        y = f.get(x)
        if y is not None:
            preds.setdefault(y, []).append(x)
    return preds


def check_block_conditions(
    labels: Sequence[Hashable],
    f: Mapping,
    blocks: Mapping[Hashable, CMat],
    dim_l: int,
    mode: str = STRICT,
    live_labels: Sequence[Hashable] | None = None,
    live_projector: CMat | None = None,
    tol: float = DEFAULT_TOLERANCES["compatibility"],
    residual_row_uniqueness: float = 0.0,
) -> CompatibilityReport:
    """
    Evaluate the three blockwise unitarity conditions for an explicit f.

    blocks[x] holds U_{x, f(x)} for every x with f(x) defined. In kraus mode only
    completeness decides the verdict; the other residuals are still reported.
    """
    if mode not in MODES:
        raise ModeError(f"mode must be one of {MODES}, got {mode!r}")
    eye = np.eye(dim_l, dtype=np.complex128)
    target = eye if live_projector is None else np.asarray(live_projector, dtype=np.complex128)
    preds = _predecessor_map(labels, f)
    violations = []
    violating_rows = []

    completeness = 0.0
    for y, xs in preds.items():
        total = sum(dagger(blocks[x]) @ blocks[x] for x in xs)
        r = residual(total - eye)
        completeness = max(completeness, r)
        if r >= tol:
            violations.append(f"completeness fails at column {y!r}: ||sum U*U - I|| = {r:.3g}")

    required = labels if live_labels is None else live_labels
    if mode == STRICT:
        for y in required:
            if y not in preds:
                completeness = max(completeness, float(np.sqrt(dim_l)))
                violations.append(f"column {y!r} has no preimage under f")

    coisometry = 0.0
    for x in labels:
        if f.get(x) is None:
            continue
        b = blocks[x]
        r = residual(b @ dagger(b) - target)
        coisometry = max(coisometry, r)
        if mode == STRICT and r >= tol:
            violating_rows.append(x)
            violations.append(f"co-isometry fails at row {x!r}: ||U U* - I|| = {r:.3g}")

    orthogonality = 0.0
    for y, xs in preds.items():
        for i, x in enumerate(xs):
            for x2 in xs[i + 1:]:
                r = residual(blocks[x] @ dagger(blocks[x2]))
                orthogonality = max(orthogonality, r)
                if mode == STRICT and r >= tol:
                    violations.append(f"siblings {x!r}, {x2!r} of {y!r} are not orthogonal: {r:.3g}")

    if mode == STRICT and live_labels is None:
        branching = [y for y, xs in preds.items() if len(xs) > 1]
        if branching:
            violations.append(
                f"f branches at {len(branching)} label(s) on a finite, fully materialized label set; "
                "the strict conditions need an infinite label set"
            )

    if mode == STRICT:
        compatible = max(completeness, coisometry, orthogonality, residual_row_uniqueness) < tol and not violations
    else:
        compatible = completeness < tol and not any(v.startswith("completeness") for v in violations)

    return CompatibilityReport(
        compatible=bool(compatible),
        f_map=dict(f),
        residual_row_uniqueness=float(residual_row_uniqueness),
        residual_completeness=float(completeness),
        residual_coisometry=float(coisometry),
        residual_orthogonality=float(orthogonality),
        violations=violations,
        violating_rows=violating_rows,
        mode=mode,
    )
