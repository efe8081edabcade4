"""
Monte-Carlo trajectories of an eventum model.

Each trajectory owns a numpy Generator seeded from (run seed, index) and draws all
of its uniforms up front, so a trajectory can be replayed alone from its seed.
Transitions are memoized in a trie keyed by the path taken, which is shared by
every trajectory of an ensemble: identical histories never recompute a branch.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Sequence

import numpy as np
import pandas as pd

from phase_1.core.errors_v1 import HorizonError, ParameterError
from phase_1.core.matcore_v1 import dagger
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES
from phase_2.eventum.evolution_v1 import check_budget, evolve
from phase_2.eventum.model_v1 import CQState, EventumModel, Trajectory


def derive_seed(seed: int, index: int) -> int:
    """Per-trajectory seed; stable across runs and platforms."""
    if seed < 0 or index < 0:
        raise ParameterError("seeds and trajectory indices must be nonnegative")
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


class _Node:
    __slots__ = ("label", "dm", "children", "cumulative", "probs")

    def __init__(self, label, dm):
        self.label = label
        self.dm = dm
        self.children = None
        self.cumulative = None
        self.probs = None

    def expand(self, model: EventumModel, prune: float) -> None:
        if self.children is not None:
            return
        children, probs = [], []
        for x in model.predecessors.get(self.label, ()):
            v = model.blocks[x]
            out = v @ self.dm @ dagger(v)
            q = float(np.real(np.trace(out)))
            if q < prune:
                continue
            dm = out / q
            children.append(_Node(x, (dm + dagger(dm)) / 2))
            probs.append(q)
        total = sum(probs)
        self.children = children
        self.probs = [q / total for q in probs] if children else []
        self.cumulative = list(np.cumsum(self.probs)) if children else []


class _TransitionCache:
    def __init__(self, model: EventumModel, init: CQState, prune: float):
        if init.dim != model.dim_l:
            raise ParameterError(f"initial state lives on dimension {init.dim}, model on {model.dim_l}")
        for br in init.branches:
            model.require_label(br.label)
        self.model = model
        self.prune = prune
        kept = [br for br in init.branches if br.weight > 0]
        self.roots = [_Node(br.label, br.dm) for br in kept]
        weights = np.array([br.weight for br in kept])
        self.weights = list(weights / weights.sum())
        self.cumulative = list(np.cumsum(self.weights))

    def walk(self, seed: int, steps: int) -> Trajectory:
        rng = np.random.default_rng(seed)
        u = rng.random(steps + 1)
        i = min(bisect_right(self.cumulative, u[0] * self.cumulative[-1]), len(self.roots) - 1)
        node = self.roots[i]
        labels = [node.label]
        jump_probs = []
        for t in range(steps):
            node.expand(self.model, self.prune)
            if not node.children:
                raise HorizonError(f"label {node.label!r} has no materialized successor", step=t + 1)
            k = min(bisect_right(node.cumulative, u[t + 1] * node.cumulative[-1]), len(node.children) - 1)
            jump_probs.append(node.probs[k])
            node = node.children[k]
            labels.append(node.label)
        return Trajectory(
            seed=int(seed),
            labels=tuple(labels),
            jump_probs=tuple(jump_probs),
            final_dm=node.dm,
            initial_weight=float(self.weights[i]),
        )


def sample_trajectory(model: EventumModel, init: CQState, steps: int, seed: int, prune: float = DEFAULT_TOLERANCES["branch_prune"]) -> Trajectory:
    check_budget(model, steps)
    return _TransitionCache(model, init, prune).walk(seed, steps)


def sample_trajectories(
    model: EventumModel,
    init: CQState,
    steps: int,
    n_traj: int,
    seed: int,
    prune: float = DEFAULT_TOLERANCES["branch_prune"],
) -> list[Trajectory]:
    """
    n_traj independent trajectories; trajectory i uses derive_seed(seed, i).
    """
    if n_traj < 0:
        raise ParameterError(f"n_traj must be nonnegative, got {n_traj}")
    check_budget(model, steps)
    cache = _TransitionCache(model, init, prune)
    return [cache.walk(derive_seed(seed, i), steps) for i in range(n_traj)]


def backward_history(model: EventumModel, x, k: int) -> list:
    """
    [x, f(x), ..., f^k(x)]: the last k settled facts behind x.
    """
    model.require_label(x)
    if k < 0:
        raise ParameterError(f"k must be nonnegative, got {k}")
    out = [x]
    for step in range(k):
        y = model.f[out[-1]]
        if y is None:
            raise HorizonError(f"history of {x!r} ends at the boundary label {out[-1]!r}", step=step + 1)
        out.append(y)
    return out


def trajectories_frame(trajectories: Sequence[Trajectory]) -> pd.DataFrame:
    """Long table: one row per (trajectory, step)."""
    rows = []
    for i, tr in enumerate(trajectories):
        for t, label in enumerate(tr.labels):
            rows.append({
                "trajectory": i,
                "seed": tr.seed,
                "step": t,
                "label": str(label),
                "jump_prob": tr.jump_probs[t - 1] if t > 0 else np.nan,
            })
    return pd.DataFrame(rows, columns=["trajectory", "seed", "step", "label", "jump_prob"])


def ensemble_summary(model: EventumModel, init: CQState, trajectories: Sequence[Trajectory], steps: int) -> pd.DataFrame:
    """
    Empirical final-label frequencies against the exact Schrödinger weights, with
    three-standard-error radii.
    """
    exact = evolve(model, init, steps)[-1].weights()
    n = len(trajectories)
    counts = pd.Series([tr.labels[-1] for tr in trajectories], dtype=object).value_counts()
    rows = []
    for label in model.labels:
        p = float(exact.get(label, 0.0))
        c = int(counts.get(label, 0))
        if p == 0.0 and c == 0:
            continue
        freq = c / n if n else np.nan
        radius = 3.0 * np.sqrt(p * (1.0 - p) / n) if n else np.nan
        rows.append({
            "label": str(label),
            "exact_prob": p,
            "count": c,
            "frequency": freq,
            "radius": radius,
            "within_radius": bool(n and abs(freq - p) <= radius + 1e-12),
        })
    return pd.DataFrame(rows, columns=["label", "exact_prob", "count", "frequency", "radius", "within_radius"])
