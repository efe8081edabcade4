"""
Eventum model types.

A model is a classical label set X, a quantum space L of dimension dim_l, a map
f: X -> X (None marks the boundary of a finite history tree) and one block
U_{x, f(x)} per label. One step moves the classical label from y to some x with
f(x) = y, so the classical path follows f backwards while f itself points to the
past.

A finite truncation of a strict world carries a Window: the labels whose
successors are all materialized, the projector onto the live part of L, and the
number of steps that stay inside the truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from phase_1.core.errors_v1 import (
    FiniteBranchingError,
    LabelError,
    ModelValidationError,
    ParameterError,
    ShapeError,
    StateError,
)
from phase_1.core.matcore_v1 import (
    CMat,
    dagger,
    require_density_matrix,
    require_square,
    residual,
    uniform_partition,
)
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES, LABEL_SEPARATOR
from phase_2.eventum.blocks_v1 import MODES, STRICT, check_block_conditions

ROOT_LABEL = ""


def history_label(symbols: Sequence) -> str:
    return LABEL_SEPARATOR.join(str(s) for s in symbols)


def history_symbols(label: str) -> list[str]:
    return label.split(LABEL_SEPARATOR) if label else []


@dataclass(frozen=True, eq=False)
class Window:
    live_labels: frozenset
    live_projector: np.ndarray
    step_budget: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "live_labels", frozenset(self.live_labels))
        p = require_square(self.live_projector, name="live projector")
        if residual(p @ p - p) > DEFAULT_TOLERANCES["solved"] or residual(p - dagger(p)) > DEFAULT_TOLERANCES["solved"]:
            raise ShapeError("live projector must be an orthogonal projector")
        object.__setattr__(self, "live_projector", p)
        if self.step_budget is not None and self.step_budget < 0:
            raise ParameterError(f"step budget must be nonnegative, got {self.step_budget}")


@dataclass(frozen=True, eq=False)
class EventumModel:
    """
    Validated eventum world. Construction raises ModelValidationError (with the
    CompatibilityReport attached) when the block conditions of the mode fail.
    """

    labels: tuple
    dim_l: int
    f: Mapping
    blocks: Mapping
    mode: str = STRICT
    window: Window | None = None
    unitary: np.ndarray | None = None
    structure: dict | None = None
    provenance: dict | None = None
    tol: float = DEFAULT_TOLERANCES["compatibility"]
    report: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ModelValidationError("label set is empty")
        if len(set(labels)) != len(labels):
            raise ModelValidationError("labels must be distinct")
        if self.dim_l < 1:
            raise ModelValidationError(f"dim_l must be positive, got {self.dim_l}")
        if self.mode not in MODES:
            raise ModelValidationError(f"mode must be one of {MODES}, got {self.mode!r}")

        label_set = set(labels)
        f = dict(self.f)
        if set(f) != label_set:
            missing = sorted(label_set - set(f))
            extra = sorted(set(f) - label_set)
            raise ModelValidationError(f"f must be defined on exactly the labels (missing {missing}, unknown {extra})")
        for x, y in f.items():
            if y is not None and y not in label_set:
                raise ModelValidationError(f"f({x!r}) = {y!r} is not a label")
        object.__setattr__(self, "f", f)

        blocks = {}
        for x in labels:
            if f[x] is None:
                continue
            if x not in self.blocks:
                raise ModelValidationError(f"missing block U_({x!r}, {f[x]!r})")
            blocks[x] = require_square(self.blocks[x], self.dim_l, f"block {x!r}")
        object.__setattr__(self, "blocks", blocks)

        if self.window is not None:
            unknown = self.window.live_labels - label_set
            if unknown:
                raise ModelValidationError(f"live labels {sorted(unknown)} are not labels")
            require_square(self.window.live_projector, self.dim_l, "live projector")

        if self.mode == STRICT and self.window is None:
            boundary = [x for x in labels if f[x] is None]
            if boundary:
                raise ModelValidationError(f"strict model without a window has boundary labels {boundary}")
            branching = {y: xs for y, xs in self.predecessors.items() if len(xs) > 1}
            if branching:
                y, xs = next(iter(branching.items()))
                raise FiniteBranchingError(
                    f"f is not injective on a finite label set ({xs} all map to {y!r}); "
                    "strict branching needs an infinite label set or a window"
                )

        report = check_block_conditions(
            labels,
            f,
            blocks,
            self.dim_l,
            mode=self.mode,
            live_labels=None if self.window is None else sorted(self.window.live_labels, key=self.label_index.__getitem__),
            live_projector=None if self.window is None else self.window.live_projector,
            tol=self.tol,
        )
        object.__setattr__(self, "report", report)
        if not report.compatible:
            raise ModelValidationError("block conditions fail: " + "; ".join(report.violations[:5]), report)

    @cached_property
    def predecessors(self) -> dict:
        """y -> labels x with f(x) = y, in label order."""
        preds = {}
        for x in self.labels:
            y = self.f[x]
            if y is not None:
                preds.setdefault(y, []).append(x)
        return {y: tuple(xs) for y, xs in preds.items()}

    @cached_property
    def label_index(self) -> dict:
        return {x: i for i, x in enumerate(self.labels)}

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def step_budget(self) -> int | None:
        return None if self.window is None else self.window.step_budget

    def partition(self):
        return uniform_partition(self.labels, self.dim_l)

    def require_label(self, x) -> None:
        if x not in self.label_index:
            raise LabelError(f"unknown label {x!r}")


def predecessors(model: EventumModel, y) -> tuple:
    """Labels x with f(x) = y; empty at the horizon of a finite history model."""
    model.require_label(y)
    return model.predecessors.get(y, ())


@dataclass(frozen=True, eq=False)
class Branch:
    label: object
    weight: float
    dm: np.ndarray


@dataclass(frozen=True, eq=False)
class CQState:
    """
    Classical-quantum state sum_x p_x δ_x ⊗ σ_x, one Branch per label.
    """

    branches: tuple

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise StateError("state has no branches")
        seen = set()
        dim = None
        for br in branches:
            if br.label in seen:
                raise StateError(f"label {br.label!r} appears twice")
            seen.add(br.label)
            if br.weight < -DEFAULT_TOLERANCES["psd"]:
                raise StateError(f"branch {br.label!r} has negative weight {br.weight}")
            dm = require_density_matrix(br.dm, dim, name=f"density matrix of branch {br.label!r}")
            dim = dm.shape[0]
        total = sum(br.weight for br in branches)
        if abs(total - 1.0) > DEFAULT_TOLERANCES["solved"]:
            raise StateError(f"branch weights sum to {total}, expected 1")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def point(cls, label, dm: CMat) -> "CQState":
        return cls((Branch(label, 1.0, np.asarray(dm, dtype=np.complex128)),))

    @classmethod
    def from_weights(cls, parts: Mapping) -> "CQState":
        """parts maps label -> (weight, density matrix)."""
        return cls(tuple(Branch(x, float(w), np.asarray(dm, dtype=np.complex128)) for x, (w, dm) in parts.items()))

    @property
    def dim(self) -> int:
        return int(self.branches[0].dm.shape[0])

    @property
    def labels(self) -> list:
        return [br.label for br in self.branches]

    def weights(self) -> dict:
        return {br.label: br.weight for br in self.branches}

    def branch(self, label) -> Branch | None:
        for br in self.branches:
            if br.label == label:
                return br
        return None

    def to_density_matrix(self, labels: Sequence) -> CMat:
        index = {x: i for i, x in enumerate(labels)}
        d = self.dim
        out = np.zeros((len(labels) * d, len(labels) * d), dtype=np.complex128)
        for br in self.branches:
            if br.label not in index:
                raise LabelError(f"branch label {br.label!r} is not among the given labels")
            i = index[br.label] * d
            out[i:i + d, i:i + d] = br.weight * br.dm
        return out

    @classmethod
    def from_density_matrix(cls, rho: CMat, labels: Sequence, dim_l: int, tol: float = DEFAULT_TOLERANCES["solved"]) -> "CQState":
        """
        Read a block-diagonal density matrix as a cq state. Off-diagonal blocks
        above tol mean the input is not classical on X.
        """
        rho = require_square(rho, len(labels) * dim_l, "cq density matrix")
        parts = {}
        for i, x in enumerate(labels):
            for j in range(len(labels)):
                if i != j and residual(rho[i * dim_l:(i + 1) * dim_l, j * dim_l:(j + 1) * dim_l]) > tol:
                    raise StateError(f"coherence between labels {x!r} and {labels[j]!r}")
            block = rho[i * dim_l:(i + 1) * dim_l, i * dim_l:(i + 1) * dim_l]
            w = float(np.real(np.trace(block)))
            if w > DEFAULT_TOLERANCES["branch_prune"]:
                parts[x] = (w, block / w)
        return cls.from_weights(parts)


@dataclass(frozen=True, eq=False)
class Trajectory:
    seed: int
    labels: tuple
    jump_probs: tuple
    final_dm: np.ndarray
    initial_weight: float = 1.0

    @property
    def steps(self) -> int:
        return len(self.labels) - 1

    @property
    def path_probability(self) -> float:
        return float(self.initial_weight * np.prod(self.jump_probs))
