"""
Autonomous worlds: the classical label moves deterministically around a
permutation and the quantum part gets the unitary of the label it leaves.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from phase_1.core.errors_v1 import FiniteBranchingError, ParameterError
from phase_1.core.matcore_v1 import CMat, require_square, unitarity_residual
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES
from phase_2.eventum.blocks_v1 import STRICT
from phase_2.eventum.model_v1 import EventumModel


def autonomous_model(perm: Mapping, block_unitaries: Mapping, provenance: dict | None = None) -> EventumModel:
    """
    perm[y] is the label that follows y; block_unitaries[y] acts while leaving y.

    f is perm inverted, so U_{perm(y), y} = block_unitaries[y]. A map that is not a
    bijection of the labels would need branching, which a finite strict world cannot have.
    """
    labels = tuple(perm)
    images = list(perm.values())
    if set(images) != set(labels) or len(set(images)) != len(images):
        raise FiniteBranchingError(
            "the label map is not a bijection; on a finite label set only bijections give strict worlds"
        )
    if set(block_unitaries) != set(labels):
        raise ParameterError("block_unitaries must have one unitary per label")

    dim_l = None
    blocks = {}
    f = {}
    for y in labels:
        v = require_square(block_unitaries[y], dim_l, f"block unitary for {y!r}")
        dim_l = v.shape[0]
        if unitarity_residual(v) > DEFAULT_TOLERANCES["solved"]:
            raise ParameterError(f"block for {y!r} is not unitary")
        x = perm[y]
        f[x] = y
        blocks[x] = v
    return EventumModel(
        labels=labels,
        dim_l=dim_l,
        f=f,
        blocks=blocks,
        mode=STRICT,
        structure={"kind": "autonomous"},
        provenance=provenance or {"constructor": "autonomous_model", "params": {"labels": list(labels)}},
    )


def cycle_model(block_unitaries: Sequence[CMat]) -> EventumModel:
    """
    Labels "0".."n-1" visited in order, wrapping around.
    """
    n = len(block_unitaries)
    if n == 0:
        raise ParameterError("a cycle needs at least one label")
    labels = [str(i) for i in range(n)]
    perm = {labels[i]: labels[(i + 1) % n] for i in range(n)}
    blocks = {labels[i]: np.asarray(v, dtype=np.complex128) for i, v in enumerate(block_unitaries)}
    return autonomous_model(perm, blocks, provenance={"constructor": "cycle_model", "params": {"n": n}})
