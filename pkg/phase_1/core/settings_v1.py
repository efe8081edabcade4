"""
Shared numeric settings.

Tolerance hierarchy:
    exact       identities that hold by construction (kron, permutations, copies)
    solved      identities obtained from a solve or a completion
    nullspace   singular-value cutoff for commutant nullspaces
    block_zero  "U_xy != 0" test when inferring the classical map f
    compatibility  pass/fail threshold on every compatibility residual
    branch_prune   branches with smaller probability are dropped
    psd         smallest eigenvalue still accepted as nonnegative
"""

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "solved": 1e-10,
    "nullspace": 1e-10,
    "block_zero": 1e-9,
    "compatibility": 1e-9,
    "branch_prune": 1e-14,
    "psd": 1e-10,
}

MAX_DIM = 4096

LABEL_SEPARATOR = "."

MODEL_FORMAT_VERSION = 1
