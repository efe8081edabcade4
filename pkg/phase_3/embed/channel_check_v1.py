"""
Cross-check of the measurement chain against the Kraus family it embeds.

One chain step from the blank record must reproduce the outcome distribution
p_x = tr(ρ A_x* A_x) and the posterior system states A_x ρ A_x* / p_x, and the
composite state after the step must be classically correlated only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from phase_1.core.matcore_v1 import CMat, basis_projector, dagger, pinch, residual, tensor_all, trace_distance
from phase_2.eventum.evolution_v1 import schrodinger_step
from phase_2.eventum.trajectories_v1 import sample_trajectories
from phase_3.embed.embedding_v1 import assemble, initial_state, outcome_record, system_state
from phase_3.embed.kraus_v1 import ChainLayout, KrausFamily


@dataclass(frozen=True, eq=False)
class ChannelCheckReport:
    outcomes: tuple
    exact_probs: np.ndarray
    stepped_probs: np.ndarray
    trace_distances: np.ndarray
    frequencies: np.ndarray
    radii: np.ndarray
    n_traj: int
    correlation_residual: float

    @property
    def max_probability_error(self) -> float:
        return float(np.max(np.abs(self.exact_probs - self.stepped_probs)))

    @property
    def max_trace_distance(self) -> float:
        finite = self.trace_distances[np.isfinite(self.trace_distances)]
        return float(finite.max()) if finite.size else 0.0

    def within_radius(self) -> bool:
        if self.n_traj == 0:
            return True
        return bool(np.all(np.abs(self.frequencies - self.exact_probs) <= self.radii + 1e-12))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "outcome": list(self.outcomes),
            "exact_prob": self.exact_probs,
            "stepped_prob": self.stepped_probs,
            "frequency": self.frequencies,
            "radius": self.radii,
            "trace_distance": self.trace_distances,
        })


def product_reference(k: KrausFamily, layout: ChainLayout, rho: CMat) -> CMat:
    """
    sum_x p_x δ_record(x) ⊗ (A_x ρ A_x*/p_x ⊗ |x><x|_A ⊗ |0..0><0..0|_Q): the
    classically correlated state one chain step should produce.
    """
    cell = layout.cell_dim
    labels_n = cell ** layout.n_classical
    blank_q = [basis_projector(cell, 0)] * layout.n_quantum
    out = 0
    for x in k.outcomes:
        a = k.op(x)
        sigma = a @ rho @ dagger(a)
        record = x  # record word 0..0x has index x
        local = tensor_all([sigma, basis_projector(cell, x)] + blank_q)
        out = out + np.kron(basis_projector(labels_n, record), local)
    return out


def channel_check(k: KrausFamily, layout: ChainLayout, rho: CMat, n_traj: int = 0, seed: int = 0, gated: bool = False) -> ChannelCheckReport:
    model, u = assemble(k, layout, gated=gated)
    init = initial_state(k, layout, rho)
    exact = k.probabilities(rho)
    posteriors = k.posterior_states(rho)

    stepped = schrodinger_step(model, init)
    stepped_probs = np.zeros(k.m)
    distances = np.full(k.m, np.nan)
    for br in stepped.branches:
        x = outcome_record(br.label)[-1]
        if x == 0:
            continue
        stepped_probs[x - 1] = br.weight
        if x in posteriors:
            distances[x - 1] = trace_distance(system_state(br.dm, k, layout), posteriors[x])

    rho_full = init.to_density_matrix(model.labels)
    after = u @ rho_full @ dagger(u)
    correlation = residual(pinch(after, model.partition()) - product_reference(k, layout, rho))

    frequencies = np.zeros(k.m)
    radii = np.zeros(k.m)
    if n_traj > 0:
        trajectories = sample_trajectories(model, init, 1, n_traj, seed)
        counts = pd.Series([outcome_record(tr.labels[-1])[-1] for tr in trajectories]).value_counts()
        frequencies = np.array([counts.get(x, 0) / n_traj for x in k.outcomes])
        radii = 3.0 * np.sqrt(exact * (1.0 - exact) / n_traj)

    return ChannelCheckReport(
        outcomes=tuple(k.outcomes),
        exact_probs=exact,
        stepped_probs=stepped_probs,
        trace_distances=distances,
        frequencies=frequencies,
        radii=radii,
        n_traj=n_traj,
        correlation_residual=float(correlation),
    )
