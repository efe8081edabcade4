"""
One-step dynamics in both pictures.

Heisenberg:    δ_x ⊗ B  ->  δ_{f(x)} ⊗ U_x* B U_x
Schrödinger:   p_y δ_y ⊗ σ_y  ->  sum_{x: f(x)=y} p_y q_x δ_x ⊗ U_x σ_y U_x* / q_x
               with q_x = tr(σ_y U_x* U_x)

Duality: <step(s), B> = <s, heisenberg(B)> for every cq state and observable.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from phase_1.core.errors_v1 import HorizonError, ParameterError
from phase_1.core.matcore_v1 import CMat, dagger, require_square
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES
from phase_2.eventum.model_v1 import Branch, CQState, EventumModel


def heisenberg_step(model: EventumModel, x, b: CMat) -> tuple:
    """
    Pull the observable δ_x ⊗ B back one step: returns (f(x), U_x* B U_x).
    """
    model.require_label(x)
    b = require_square(b, model.dim_l, "observable")
    y = model.f[x]
    if y is None:
        raise HorizonError(f"label {x!r} is a boundary label; f is undefined there")
    v = model.blocks[x]
    return y, dagger(v) @ b @ v


def heisenberg_evolve(model: EventumModel, observable: Mapping, skip_boundary: bool = False) -> dict:
    """
    Pull back a classical-quantum observable sum_x δ_x ⊗ B_x; terms at the same f(x) add up.
    With skip_boundary, terms on labels where f is undefined pull back to zero
    instead of raising.
    """
    out = {}
    for x, b in observable.items():
        model.require_label(x)
        if skip_boundary and model.f[x] is None:
            continue
        y, pulled = heisenberg_step(model, x, b)
        out[y] = out[y] + pulled if y in out else pulled
    return out


def pairing(state: CQState, observable: Mapping) -> complex:
    """<state, observable> = sum_x p_x tr(σ_x B_x)."""
    total = 0.0 + 0.0j
    for br in state.branches:
        b = observable.get(br.label)
        if b is not None:
            total += br.weight * np.trace(br.dm @ b)
    return complex(total)


def schrodinger_step(model: EventumModel, state: CQState, prune: float = DEFAULT_TOLERANCES["branch_prune"]) -> CQState:
    """
    Push the cq state one step forward. Successors with q_x below prune are dropped;
    equal labels reached from different branches are merged.
    """
    if state.dim != model.dim_l:
        raise ParameterError(f"state lives on dimension {state.dim}, model on {model.dim_l}")
    merged = {}
    for br in state.branches:
        model.require_label(br.label)
        successors = model.predecessors.get(br.label, ())
        if not successors:
            raise HorizonError(f"label {br.label!r} has no materialized successor")
        for x in successors:
            v = model.blocks[x]
            out = v @ br.dm @ dagger(v)
            q = float(np.real(np.trace(out)))
            if q < prune:
                continue
            weight, acc = merged.get(x, (0.0, 0.0))
            merged[x] = (weight + br.weight * q, acc + br.weight * out)

    if not merged:
        raise HorizonError("every successor branch was pruned")
    total = sum(w for w, _ in merged.values())
    branches = []
    for x in model.labels:
        if x not in merged:
            continue
        w, acc = merged[x]
        dm = acc / w
        branches.append(Branch(x, w / total, (dm + dagger(dm)) / 2))
    return CQState(tuple(branches))


def check_budget(model: EventumModel, steps: int) -> None:
    if steps < 0:
        raise ParameterError(f"steps must be nonnegative, got {steps}")
    budget = model.step_budget
    if budget is not None and steps > budget:
        raise HorizonError(f"{steps} steps requested but the window only supports {budget}", step=budget + 1)


def evolve(model: EventumModel, state: CQState, steps: int) -> list[CQState]:
    """
    States after 0..steps Schrödinger steps.
    """
    check_budget(model, steps)
    states = [state]
    for t in range(steps):
        try:
            states.append(schrodinger_step(model, states[-1]))
        except HorizonError as exc:
            raise HorizonError(str(exc), step=t + 1) from exc
    return states


def duality_residual(model: EventumModel, state: CQState, b: CMat, x=None) -> float:
    """
    |<step(state), δ_x ⊗ B> - <state, heisenberg(δ_x ⊗ B)>|; x=None uses I_X ⊗ B.
    A boundary label is never reached by a step, so both sides vanish there.
    """
    if x is None:
        observable = {label: b for label in model.labels}
    else:
        model.require_label(x)
        observable = {x: b}
    forward = pairing(schrodinger_step(model, state), observable)
    backward = pairing(state, heisenberg_evolve(model, observable, skip_boundary=True))
    return float(abs(forward - backward))
