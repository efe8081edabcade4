"""
Random models and states for property tests.
"""

from __future__ import annotations

import numpy as np

from phase_1.core.errors_v1 import ParameterError
from phase_1.core.matcore_v1 import haar_unitary, random_density_matrix
from phase_2.eventum.blocks_v1 import KRAUS
from phase_2.eventum.model_v1 import CQState, EventumModel
from phase_2.models.autonomous_v1 import autonomous_model


def random_autonomous_model(num_labels: int, dim_l: int, rng: np.random.Generator) -> EventumModel:
    labels = [str(i) for i in range(num_labels)]
    order = rng.permutation(num_labels)
    perm = {labels[i]: labels[order[i]] for i in range(num_labels)}
    blocks = {x: haar_unitary(dim_l, rng) for x in labels}
    return autonomous_model(perm, blocks, provenance={"constructor": "random_autonomous_model", "params": {}})


def random_kraus_model(num_labels: int, dim_l: int, rng: np.random.Generator) -> EventumModel:
    """
    Random f with Haar-random Kraus families on every label that has preimages.
    """
    if num_labels < 1 or dim_l < 1:
        raise ParameterError("need at least one label and a nonzero quantum dimension")
    labels = [str(i) for i in range(num_labels)]
    f = {x: labels[int(rng.integers(num_labels))] for x in labels}
    preds = {}
    for x in labels:
        preds.setdefault(f[x], []).append(x)
    blocks = {}
    for y, xs in preds.items():
        k = len(xs)
        iso = haar_unitary(k * dim_l, rng)[:, :dim_l]
        for i, x in enumerate(xs):
            blocks[x] = iso[i * dim_l:(i + 1) * dim_l, :]
    return EventumModel(
        labels=tuple(labels),
        dim_l=dim_l,
        f=f,
        blocks=blocks,
        mode=KRAUS,
        provenance={"constructor": "random_kraus_model", "params": {}},
    )


def random_cq_state(model: EventumModel, rng: np.random.Generator, max_branches: int = 3) -> CQState:
    """Random state supported on labels that have successors."""
    candidates = [y for y in model.labels if y in model.predecessors]
    if not candidates:
        raise ParameterError("model has no label with a successor")
    k = int(rng.integers(1, min(max_branches, len(candidates)) + 1))
    chosen = rng.choice(len(candidates), size=k, replace=False)
    weights = rng.dirichlet(np.ones(k))
    return CQState.from_weights({
        candidates[i]: (float(w), random_density_matrix(model.dim_l, rng)) for i, w in zip(chosen, weights)
    })
