"""
Two-level atom watched by a Geiger counter.

The atom starts in α|0> + β|1>. Each tick the counter either stays silent ("n")
or clicks ("c"); after a click the atom sits in |0> and only the idle step ("-")
remains. Labels are the recorded histories up to the horizon, f drops the last
symbol, and the blocks depend on the last symbol only:

    click     √γ |0><1|
    no click  diag(1, √(1-γ))
    idle      I

The first click happens at step n with probability |β|² γ (1-γ)^(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from phase_1.core.errors_v1 import ParameterError
from phase_1.core.matcore_v1 import CMat, pure_state
from phase_2.eventum.blocks_v1 import KRAUS
from phase_2.eventum.evolution_v1 import evolve
from phase_2.eventum.model_v1 import ROOT_LABEL, CQState, EventumModel, Window, history_label, history_symbols
from phase_2.eventum.trajectories_v1 import sample_trajectories

NO_CLICK = "n"
CLICK = "c"
IDLE = "-"


@dataclass(frozen=True)
class GeigerParams:
    alpha: complex
    beta: complex
    gamma: float
    horizon: int

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ParameterError(f"|alpha|^2 + |beta|^2 must be 1, got {norm}")
        if not 0.0 < self.gamma <= 1.0:
            raise ParameterError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.horizon <= 0:
            raise ParameterError(f"horizon must be positive, got {self.horizon}")

    @classmethod
    def from_beta_sq(cls, beta_sq: float, gamma: float, horizon: int) -> "GeigerParams":
        if not 0.0 <= beta_sq <= 1.0:
            raise ParameterError(f"|beta|^2 must lie in [0, 1], got {beta_sq}")
        return cls(alpha=complex(np.sqrt(1.0 - beta_sq)), beta=complex(np.sqrt(beta_sq)), gamma=gamma, horizon=horizon)

    @property
    def initial_vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)


def geiger_blocks(gamma: float) -> dict[str, CMat]:
    return {
        CLICK: np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128),
        NO_CLICK: np.diag([1.0, np.sqrt(1.0 - gamma)]).astype(np.complex128),
        IDLE: np.eye(2, dtype=np.complex128),
    }


def _histories(horizon: int) -> list[str]:
    labels = [ROOT_LABEL]
    frontier = [ROOT_LABEL]
    for _ in range(horizon):
        nxt = []
        for y in frontier:
            symbols = history_symbols(y)
            options = [IDLE] if CLICK in symbols else [NO_CLICK, CLICK]
            nxt.extend(history_label(symbols + [s]) for s in options)
        labels.extend(nxt)
        frontier = nxt
    return labels


def geiger_model(params: GeigerParams) -> tuple[EventumModel, CQState]:
    """
    Kraus-mode history model and its initial state (root label, α|0> + β|1>).
    """
    labels = _histories(params.horizon)
    f = {}
    blocks = {}
    table = geiger_blocks(params.gamma)
    for x in labels:
        symbols = history_symbols(x)
        if not symbols:
            f[x] = None
            continue
        f[x] = history_label(symbols[:-1])
        blocks[x] = table[symbols[-1]]
    window = Window(
        live_labels=frozenset(x for x in labels if len(history_symbols(x)) < params.horizon),
        live_projector=np.eye(2, dtype=np.complex128),
        step_budget=params.horizon,
    )
    model = EventumModel(
        labels=tuple(labels),
        dim_l=2,
        f=f,
        blocks=blocks,
        mode=KRAUS,
        window=window,
        structure={"kind": "geiger"},
        provenance={
            "constructor": "geiger_model",
            "params": {"beta_sq": abs(params.beta) ** 2, "gamma": params.gamma, "horizon": params.horizon},
        },
    )
    return model, CQState.point(ROOT_LABEL, pure_state(params.initial_vector))


def geiger_closed_form(params: GeigerParams, n: int) -> tuple[float, np.ndarray]:
    """
    (probability of the first click at step n, no-click density matrix after n steps).
    n = 0 gives the initial state.
    """
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    p_click = 0.0 if n == 0 else abs(params.beta) ** 2 * params.gamma * (1.0 - params.gamma) ** (n - 1)
    vec = np.array([params.alpha, params.beta * (1.0 - params.gamma) ** (n / 2.0)], dtype=np.complex128)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ParameterError(f"the no-click branch has zero probability after {n} steps")
    return float(p_click), pure_state(vec / norm)


def no_click_label(n: int) -> str:
    return history_label([NO_CLICK] * n)


def click_label(n: int) -> str:
    """History with its first click at step n (1-based), recorded at step n."""
    return history_label([NO_CLICK] * (n - 1) + [CLICK])


def geiger_click_time(label: str) -> int | None:
    symbols = history_symbols(label)
    return symbols.index(CLICK) + 1 if CLICK in symbols else None


def geiger_click_times(trajectories) -> pd.Series:
    """First-click step of every trajectory; NaN when it never clicked."""
    return pd.Series([geiger_click_time(tr.labels[-1]) for tr in trajectories], dtype="float64")


def geiger_records(params: GeigerParams, n_traj: int = 0, seed: int = 0) -> pd.DataFrame:
    """
    Per-step table of exact and closed-form click probabilities and the no-click
    state. With n_traj > 0 the empirical first-click frequencies and their
    three-standard-error radii are added.
    """
    model, init = geiger_model(params)
    states = evolve(model, init, params.horizon)
    rows = []
    cumulative = 0.0
    for n in range(1, params.horizon + 1):
        weights = states[n].weights()
        p_exact = float(weights.get(click_label(n), 0.0))
        cumulative += p_exact
        p_closed, _ = geiger_closed_form(params, n)
        silent = states[n].branch(no_click_label(n))
        row = {
            "step": n,
            "p_click": p_exact,
            "p_click_closed_form": p_closed,
            "p_clicked_by_step": cumulative,
        }
        if silent is not None:
            row["no_click_weight"] = silent.weight
            row["no_click_p1"] = float(np.real(silent.dm[1, 1]))
            row["no_click_coherence_abs"] = float(abs(silent.dm[0, 1]))
        rows.append(row)
    out = pd.DataFrame(rows)

    if n_traj > 0:
        trajectories = sample_trajectories(model, init, params.horizon, n_traj, seed)
        counts = geiger_click_times(trajectories).value_counts()
        out["frequency"] = [counts.get(float(n), 0) / n_traj for n in out["step"]]
        out["radius"] = 3.0 * np.sqrt(out["p_click"] * (1.0 - out["p_click"]) / n_traj)
    return out
