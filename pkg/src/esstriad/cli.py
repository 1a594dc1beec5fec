"""Command-line front end.

Subcommands: ``generate`` (synthetic triplets), ``check`` (compatibility
decision with report), ``average`` (rectify a noisy triplet),
``calibrate`` (three-view auto-calibration), ``selftest`` (invariant
suite). Exit codes for ``check``: 0 compatible, 1 incompatible,
2 degenerate. Every command exits 3 on runtime/schema errors (with a
machine-readable payload under ``--json``) and 4 on usage errors.

The environment variable ``ESSTRIAD_SEED`` supplies the default seed.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, averaging, constraints, selftest, serialize, synthesis
from .autocalib import solve_calibration
from .errors import EsstriadError

EXIT_COMPATIBLE = 0
EXIT_INCOMPATIBLE = 1
EXIT_DEGENERATE = 2
EXIT_ERROR = 3
EXIT_USAGE = 4

_DECISION_EXIT = {
    constraints.COMPATIBLE: EXIT_COMPATIBLE,
    constraints.INCOMPATIBLE: EXIT_INCOMPATIBLE,
    constraints.DEGENERATE: EXIT_DEGENERATE,
}

SEED_ENV = "ESSTRIAD_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _matrix(m) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def _cmd_generate(args) -> int:
    seed = args.seed
    metadata = {"seed": seed, "mode": args.mode}
    witness_payload = None
    if args.mode.startswith("family:"):
        family = args.mode.split(":", 1)[1]
        params = synthesis.sample_family_params(family, seed)
        triplet = synthesis.family_triplet(params)
        witness = synthesis.witness_for_family(params)
        metadata["family"] = family
        metadata["params"] = {k: float(v) for k, v in params.scalars.items()}
        witness_payload = serialize.chain_witness_payload(witness)
    else:
        mode = {
            "general": synthesis.GENERAL,
            "collinear": synthesis.COLLINEAR,
            "near": synthesis.NEAR_COINCIDENT,
        }.get(args.mode)
        if mode is None:
            raise EsstriadError(f"unknown generation mode {args.mode!r}")
        cameras = synthesis.random_camera_triple(mode, seed, epsilon=args.epsilon)
        triplet = synthesis.triplet_from_cameras(cameras)
        if mode == synthesis.NEAR_COINCIDENT:
            metadata["epsilon"] = args.epsilon
        witness_payload = serialize.camera_witness_payload(cameras)
    doc = serialize.triplet_document(triplet, metadata)
    _write_output(args.out, serialize.serialize_triplet(doc))
    if args.witness:
        _write_output(args.witness, serialize.dumps(witness_payload))
    return 0


def _spectral_payload(sd: constraints.SpectralDiagnostics) -> dict:
    return {
        "eigenvalues": [float(x) for x in sd.eigenvalues],
        "pairing_defect": sd.pairing_defect,
        "lambda_relation": sd.lambda_relation,
        "vanishing_char_coeffs": {
            power: float(c) for power, c in
            zip(("8", "6", "4", "2", "1", "0"), sd.odd_char_coeffs)
        },
    }


def _cmd_check(args) -> int:
    text = _read_input(args.file)
    doc = serialize.parse_triplet(text)
    provenance = {"input_sha256": serialize.sha256_hex(text),
                  "version": __version__}
    if doc.kind == serialize.KIND_ESSENTIAL:
        decision = constraints.is_compatible(
            doc.essential_triplet(), tol=args.tol, residual_set=args.set)
        report = {
            "command": "check",
            "decision": decision.decision,
            "exit_code": _DECISION_EXIT[decision.decision],
            "residuals": {
                "set": decision.report.set_name,
                "normalized": decision.report.normalized,
                "count": int(decision.report.scalars().size),
                "max": decision.report.max_abs(),
                "families": decision.report.family_maxima(),
            },
            "spectral": _spectral_payload(decision.spectral),
            "tolerances": {"residual_tol": args.tol,
                           "rank_tol": decision.rank_tol},
            "provenance": provenance,
        }
        code = _DECISION_EXIT[decision.decision]
    else:
        from .errors import RankError
        try:
            res = constraints.fundamental_triplet_residuals(*doc.block_arrays())
            max_abs = res.max_abs()
            decision = (constraints.COMPATIBLE if max_abs <= args.tol
                        else constraints.INCOMPATIBLE)
            families = {
                "triple_product": max(float(np.max(np.abs(m)))
                                      for m in res.triple_products.values()),
                "epipole_match": max(abs(v)
                                     for v in res.epipole_matches.values()),
            }
        except RankError:
            decision, max_abs, families = constraints.DEGENERATE, None, {}
        report = {
            "command": "check",
            "decision": decision,
            "exit_code": _DECISION_EXIT[decision],
            "residuals": {"max": max_abs, "families": families},
            "tolerances": {"residual_tol": args.tol},
            "provenance": provenance,
        }
        code = _DECISION_EXIT[decision]
    if args.json:
        sys.stdout.write(serialize.dumps(report))
    else:
        sys.stdout.write(f"decision: {report['decision']}\n")
        if report["residuals"].get("max") is not None:
            sys.stdout.write(
                f"max normalized residual: {report['residuals']['max']:.6e} "
                f"(tol {args.tol:g})\n")
    return code


def _cmd_average(args) -> int:
    text = _read_input(args.file)
    doc = serialize.parse_triplet(text)
    result = averaging.average(doc.essential_triplet(),
                               restarts=args.restarts, seed=args.seed)
    out_doc = serialize.triplet_document(
        result.triplet,
        {"seed": args.seed, "mode": "average", "source_sha256":
         serialize.sha256_hex(text)})
    _write_output(args.out, serialize.serialize_triplet(out_doc))
    report = {
        "command": "average",
        "cost": result.cost,
        "distance": float(np.sqrt(max(result.cost, 0.0))),
        "scales": [float(x) for x in result.scales],
        "iterations": result.iterations,
        "converged": result.converged,
        "restarts": args.restarts,
        "feasibility_max_residual": result.residual_report.max_abs(),
        "provenance": {"input_sha256": serialize.sha256_hex(text),
                       "version": __version__, "seed": args.seed},
    }
    if args.sigma_report:
        per_edge = []
        that = doc.essential_triplet()
        for scale, a, b in zip(result.scales, result.triplet.blocks(),
                               that.blocks()):
            per_edge.append(float(np.linalg.norm(a - scale * b)))
        report["per_edge_distance"] = per_edge
    if args.json:
        sys.stdout.write(serialize.dumps(report))
    else:
        sys.stdout.write(
            f"cost: {result.cost:.6e} converged: {result.converged} "
            f"iterations: {result.iterations}\n")
    return 0


def _cmd_calibrate(args) -> int:
    text = _read_input(args.file)
    doc = serialize.parse_triplet(text)
    solution = solve_calibration(*doc.block_arrays())
    report = {
        "command": "calibrate",
        "status": solution.status,
        "nullspace_dim": solution.nullspace_dim,
        "singular_values": [float(x) for x in solution.singular_values],
        "provenance": {"input_sha256": serialize.sha256_hex(text),
                       "version": __version__},
    }
    if solution.nullspace.size:
        report["nullspace"] = [[float(x) for x in col]
                               for col in solution.nullspace.T]
    if solution.dual_candidates is not None:
        report["dual_candidates"] = [_matrix(c) for c in solution.dual_candidates]
    if solution.calibrations is not None:
        report["calibrations"] = [_matrix(k) for k in solution.calibrations]
    if solution.residuals is not None:
        report["validation_max_residual"] = solution.residuals.max_abs()
    text_out = serialize.dumps(report)
    if args.out:
        _write_output(args.out, text_out)
    if args.json or not args.out:
        sys.stdout.write(text_out)
    else:
        sys.stdout.write(f"status: {solution.status} "
                         f"(nullspace dimension {solution.nullspace_dim})\n")
    return 0


def _cmd_selftest(args) -> int:
    results = selftest.run_selftest(trials=args.trials, seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        sys.stdout.write(f"{status}  {name:<{width}}  {detail}\n")
        failures += 0 if ok else 1
    sys.stdout.write(f"{len(results) - failures}/{len(results)} checks passed\n")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="esstriad",
                     description="Triplets of essential matrices: generate, "
                                 "check, average, calibrate.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic triplet")
    g.add_argument("--mode", default="general",
                   help="general | collinear | near | family:<id> "
                        f"(ids: {', '.join(synthesis.FAMILIES)})")
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--epsilon", type=float, default=1e-3,
                   help="center separation for mode 'near'")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.add_argument("--witness", default=None,
                   help="also write the generating witness to this file")
    g.set_defaults(fn=_cmd_generate)

    c = sub.add_parser("check", help="decide compatibility of a triplet file")
    c.add_argument("file", nargs="?", default="-",
                   help="triplet JSON (default stdin)")
    c.add_argument("--set", choices=("full", "reduced"), default="full")
    c.add_argument("--tol", type=float, default=constraints.DEFAULT_TOL)
    c.add_argument("--json", action="store_true",
                   help="emit the full report as JSON")
    c.set_defaults(fn=_cmd_check)

    a = sub.add_parser("average", help="rectify a noisy triplet")
    a.add_argument("file", nargs="?", default="-")
    a.add_argument("--restarts", type=int, default=averaging.RESTARTS)
    a.add_argument("--seed", type=int, default=_default_seed())
    a.add_argument("--sigma-report", action="store_true",
                   help="include per-edge distances in the report")
    a.add_argument("--out", default=None)
    a.add_argument("--json", action="store_true")
    a.set_defaults(fn=_cmd_average)

    k = sub.add_parser("calibrate", help="three-view auto-calibration")
    k.add_argument("file", nargs="?", default="-")
    k.add_argument("--out", default=None)
    k.add_argument("--json", action="store_true")
    k.set_defaults(fn=_cmd_calibrate)

    s = sub.add_parser("selftest", help="run the invariant suite")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    json_mode = bool(getattr(args, "json", False))
    try:
        return args.fn(args)
    except EsstriadError as exc:
        if json_mode:
            sys.stdout.write(serialize.dumps({
                "error": {"type": type(exc).__name__, "message": str(exc),
                          "path": getattr(exc, "path", None)},
            }))
        else:
            sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
