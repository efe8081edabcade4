"""
Command line entry point.

    eventum verify    MODEL                      compatibility verdict and residuals
    eventum simulate  MODEL STATE --steps ...    seeded trajectory ensemble -> run record
    eventum embed     KRAUS --cells ...          measurement chain model for a Kraus family
    eventum commutant GENERATORS                 commutant dimension and center
    eventum geiger    --beta-sq ... --gamma ...  Geiger counter records

Exit codes: 0 success, 1 negative verdict, 2 input error.
"""

from __future__ import annotations

import argparse
import sys

import pandas as pd

from phase_1.algebra.vnalg_v1 import center, commutant, is_commutative
from phase_1.core.errors_v1 import EventumError
from phase_1.core.settings_v1 import DEFAULT_TOLERANCES, MODEL_FORMAT_VERSION
from phase_2.eventum.blocks_v1 import RESIDUAL_NAMES, STRICT, CompatibilityReport, check_block_conditions
from phase_2.eventum.compatibility_v1 import check_compatibility, reconstruct_u
from phase_2.eventum.model_v1 import EventumModel
from phase_2.eventum.trajectories_v1 import ensemble_summary, sample_trajectories, trajectories_frame
from phase_2.models.geiger_v1 import GeigerParams, geiger_model, geiger_records
from phase_3.cli.model_io_v1 import (
    RUN_FORMAT,
    file_digest,
    read_generators,
    read_kraus,
    read_model,
    read_model_file,
    read_state,
    write_json,
    write_model,
    write_state,
)
from phase_3.embed.embedding_v1 import assemble
from phase_3.embed.kraus_v1 import ChainLayout, KrausFamily

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


def _print_report(report: CompatibilityReport) -> None:
    print(f"mode: {report.mode}")
    if report.f_map is None:
        print("f: unresolved")
    else:
        for x, y in report.f_map.items():
            print(f"f({x!r}) = {y!r}")
    for name in RESIDUAL_NAMES:
        print(f"{name}: {getattr(report, name)!r}")
    if report.beable_inclusion is not None:
        print(f"beable_inclusion: {report.beable_inclusion!r}")
    if report.predictable_inclusion is not None:
        print(f"predictable_inclusion: {report.predictable_inclusion!r}")
    for v in report.violations:
        print(f"violation: {v}")
    print(f"verdict: {'compatible' if report.compatible else 'incompatible'}")


def cmd_verify(args) -> int:
    mf = read_model_file(args.model)
    if mf.f is None or mf.blocks is None:
        report = check_compatibility(mf.unitary, len(mf.labels), mf.dim_l, labels=mf.labels, window=mf.window, tol=args.tolerance)
    else:
        report = check_block_conditions(
            mf.labels,
            mf.f,
            mf.blocks,
            mf.dim_l,
            mode=mf.mode,
            live_labels=None if mf.window is None else [x for x in mf.labels if x in mf.window.live_labels],
            live_projector=None if mf.window is None else mf.window.live_projector,
            tol=args.tolerance,
        )
        if report.compatible and mf.mode == STRICT:
            if mf.unitary is not None:
                report = check_compatibility(mf.unitary, len(mf.labels), mf.dim_l, labels=mf.labels, window=mf.window, tol=args.tolerance)
            elif mf.window is None:
                u = reconstruct_u(mf.to_model(tol=args.tolerance))
                report = check_compatibility(u, len(mf.labels), mf.dim_l, labels=mf.labels, tol=args.tolerance)
    _print_report(report)
    return EXIT_OK if report.compatible else EXIT_NEGATIVE


def _run_record(args, model: EventumModel, trajectories, summary: pd.DataFrame) -> dict:
    return {
        "format": RUN_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "seed": args.seed,
        "steps": args.steps,
        "n_traj": args.ntraj,
        "model": {"path": args.model, "sha256": file_digest(args.model), "num_labels": model.num_labels, "dim_l": model.dim_l},
        "state": {"path": args.state, "sha256": file_digest(args.state)},
        "trajectories": [
            {
                "index": i,
                "seed": tr.seed,
                "labels": list(tr.labels),
                "initial_weight": tr.initial_weight,
                "jump_probs": list(tr.jump_probs),
            }
            for i, tr in enumerate(trajectories)
        ],
        # empty ensembles leave NaN frequencies; JSON has no NaN
        "summary": summary.astype(object).where(summary.notna(), None).to_dict(orient="records"),
    }


def cmd_simulate(args) -> int:
    model = read_model(args.model)
    init = read_state(args.state)
    trajectories = sample_trajectories(model, init, args.steps, args.ntraj, args.seed)
    summary = ensemble_summary(model, init, trajectories, args.steps)
    write_json(args.out, _run_record(args, model, trajectories, summary))
    print(f"Saved run -> {args.out} (trajectories={args.ntraj}, steps={args.steps}, seed={args.seed})")
    if args.table:
        trajectories_frame(trajectories).to_parquet(args.table, index=False)
        print(f"Saved table -> {args.table} (rows={args.ntraj * (args.steps + 1)})")
    print(summary.to_string(index=False))
    return EXIT_OK


def cmd_embed(args) -> int:
    dim_s, ops = read_kraus(args.kraus)
    family = KrausFamily(dim_s, tuple(ops), tol=args.kraus_tolerance)
    layout = ChainLayout.for_family(family, args.cells, args.classical_cells)
    model, _ = assemble(family, layout, gated=args.gated)
    write_model(args.out, model, include_unitary=args.with_unitary)
    print(f"Saved model -> {args.out} (labels={model.num_labels}, dim_l={model.dim_l})")
    print(f"Step budget: {model.step_budget} (outcomes={family.m}, cells={layout.n_cells}, gated={args.gated})")
    return EXIT_OK


def cmd_commutant(args) -> int:
    dim, generators = read_generators(args.generators)
    comm = commutant(generators, dim, tol=args.tolerance)
    cent = center(comm, tol=args.tolerance)
    print(f"dimension: {dim}")
    print(f"commutant_dimension: {comm.size}")
    print(f"commutant_is_commutative: {is_commutative(comm)}")
    print(f"center_dimension: {cent.size}")
    return EXIT_OK


def cmd_geiger(args) -> int:
    params = GeigerParams.from_beta_sq(args.beta_sq, args.gamma, args.horizon)
    records = geiger_records(params, n_traj=args.ntraj, seed=args.seed)
    if args.out:
        records.to_csv(args.out, index=False)
        print(f"Saved records -> {args.out} (rows={len(records)})")
    else:
        print(records.to_string(index=False))
    if args.model_out or args.state_out:
        model, init = geiger_model(params)
        if args.model_out:
            write_model(args.model_out, model)
        if args.state_out:
            write_state(args.state_out, init)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eventum", description="Eventum mechanics simulator")
    ap.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCES["compatibility"])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a model file for compatibility")
    p.add_argument("model")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="sample a seeded trajectory ensemble")
    p.add_argument("model")
    p.add_argument("state")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--ntraj", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--table", help="also write the trajectories as a parquet table")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("embed", help="build the measurement chain for a Kraus family")
    p.add_argument("kraus")
    p.add_argument("--cells", type=int, required=True)
    p.add_argument("--classical-cells", type=int, required=True)
    p.add_argument("--gated", action="store_true")
    p.add_argument("--with-unitary", action="store_true", help="store the composite unitary in the model file")
    p.add_argument("--kraus-tolerance", type=float, default=DEFAULT_TOLERANCES["solved"], help="completeness tolerance for sum A*A = I")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("commutant", help="commutant and center of a generator set")
    p.add_argument("generators")
    p.set_defaults(func=cmd_commutant)

    p = sub.add_parser("geiger", help="Geiger counter click statistics")
    p.add_argument("--beta-sq", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--horizon", type=int, default=60)
    p.add_argument("--ntraj", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output; printed when omitted")
    p.add_argument("--model-out")
    p.add_argument("--state-out")
    p.set_defaults(func=cmd_geiger)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EventumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None:
            for v in report.violations:
                print(f"violation: {v}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
