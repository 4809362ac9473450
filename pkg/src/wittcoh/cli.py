"""Command line front end.

Subcommands:

    cohomology         windowed H^q_d with stable-dimension filtering
    central-extension  H^2 with trivial coefficients in weight 0
    replay             the symbolic diagonal-recurrence replay
    jacobi             Jacobi certification of a bracket on a window
    deform             defect report / trivialization of a deformation document

Exit codes: 0 success (and expectation met when --expect is given),
1 verification mismatch, 2 usage or configuration error, 3 internal
contradiction.  Every number in the output is an exact rational rendered as
p/q; nothing is ever printed through floating point.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .algebra import Window, check_jacobi, load_algebra, make_virasoro, make_witt
from .cochains import parse_window
from .cohomology import (
    CohomologyReport,
    central_extension_dim,
    cohomology_dim,
    stability_scan,
)
from .deformation import jacobi_defect, parse_deformation, trivialize
from .errors import BoundaryError, ConfigError, ContradictionError, FormatError, NotACocycleError
from .replay import SymbolicValue, final_solve, run_replay

OUTPUT_DIR_ENV = "WITTCOH_OUTPUT_DIR"


def _resolve_algebra(selector: str):
    if selector == "witt":
        return make_witt()
    if selector == "virasoro":
        return make_virasoro()
    try:
        with open(selector, "r", encoding="utf-8") as handle:
            return load_algebra(handle.read())
    except OSError as exc:
        raise ConfigError(f"cannot read algebra file {selector!r}: {exc}") from None


def _check_run_window(window: Window, margin: int):
    if not (window.lo < 0 < window.hi):
        raise ConfigError(f"window {window} must straddle zero (lo < 0 < hi)")
    if margin < 0 or 2 * margin >= window.hi - window.lo:
        raise ConfigError(f"margin {margin} too large for window {window}")


def emit_report(report: CohomologyReport, fmt: str) -> str:
    """Deterministic serialization of a cohomology report."""
    if fmt == "json":
        return json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        lines = ["window,dim_stable"]
        for window, dim in report.stabilization:
            lines.append(f"{window.lo}:{window.hi},{dim}")
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = [
            "| field | value |",
            "|---|---|",
            f"| algebra | {report.algebra} |",
            f"| coefficients | {report.coeffs} |",
            f"| degree | {report.degree} |",
            f"| weight | {report.weight} |",
            f"| window | {report.window} |",
            f"| margin | {report.margin} |",
            f"| dim_cocycles | {report.dim_cocycles} |",
            f"| dim_coboundaries | {report.dim_coboundaries} |",
            f"| dim_stable | {report.dim_stable} |",
            f"| omitted_triples | {report.omitted_triples} |",
        ]
        return "\n".join(lines) + "\n"
    if fmt == "text":
        lines = [
            f"algebra: {report.algebra}",
            f"coefficients: {report.coeffs}",
            f"degree: {report.degree}",
            f"weight: {report.weight}",
            f"window: {report.window}",
            f"margin: {report.margin}",
            f"dim_cocycles: {report.dim_cocycles}",
            f"dim_coboundaries: {report.dim_coboundaries}",
            f"dim_stable: {report.dim_stable}",
            f"omitted_triples: {report.omitted_triples}",
            "stabilization: " + "; ".join(
                f"{w} -> {n}" for w, n in report.stabilization),
        ]
        for rep in report.representatives:
            lines.append("representative:")
            for t in sorted(rep.entries):
                lines.append(f"  {t} -> {rep.entries[t]}")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unsupported format {fmt!r}")


def _write(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir and not os.path.isabs(path):
        path = os.path.join(outdir, path)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wittcoh",
        description="Exact windowed Lie-algebra cohomology and rigidity checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    coh = sub.add_parser("cohomology", help="windowed H^q_d report")
    coh.add_argument("--algebra", default="witt",
                     help="witt, virasoro, or a structure-constants file")
    coh.add_argument("--degree", type=int, default=2)
    coh.add_argument("--weight", type=int, default=0)
    coh.add_argument("--window", default="-12:12", help="lo:hi (use --window=-12:12)")
    coh.add_argument("--margin", type=int, default=4)
    coh.add_argument("--coefficients", choices=("adjoint", "trivial"), default="adjoint")
    coh.add_argument("--stabilize", default=None,
                     help="comma-separated windows, e.g. -8:8,-10:10,-12:12")
    coh.add_argument("--expect", type=int, default=None,
                     help="exit 0 iff dim_stable equals this value")
    coh.add_argument("--format", default="text", choices=("json", "csv", "markdown", "text"))
    coh.add_argument("--output", default=None)

    cen = sub.add_parser("central-extension", help="H^2 with trivial coefficients")
    cen.add_argument("--window", default="-10:10")
    cen.add_argument("--margin", type=int, default=3)
    cen.add_argument("--expect", type=int, default=None)
    cen.add_argument("--format", default="text", choices=("json", "csv", "markdown", "text"))
    cen.add_argument("--output", default=None)

    rep = sub.add_parser("replay", help="symbolic diagonal-recurrence replay")
    rep.add_argument("--K", type=int, default=12, help="table window half-width")
    rep.add_argument("--buffer", type=int, default=3,
                     help="solve unknowns a_k for |k| <= K - buffer")
    rep.add_argument("--emit-table", action="store_true",
                     help="print the markdown fact table (pre-recurrence stage)")
    rep.add_argument("--emit-log", action="store_true", help="print the derivation log")
    rep.add_argument("--expect", type=int, default=None,
                     help="exit 0 iff the solution-space dimension equals this")
    rep.add_argument("--inject-relation", default=None, metavar="K=V",
                     help="consistency audit: add the fake relation a_K = V")
    rep.add_argument("--output", default=None)

    jac = sub.add_parser("jacobi", help="Jacobi certification on a window")
    jac.add_argument("--algebra", default="witt")
    jac.add_argument("--window", default="-15:15")
    jac.add_argument("--output", default=None)

    dfm = sub.add_parser("deform", help="defect report and trivialization verdict")
    dfm.add_argument("--file", required=True, help="deformation document")
    dfm.add_argument("--margin", type=int, default=4)
    dfm.add_argument("--algebra-file", default=None,
                     help="structure-constants file resolving the document's algebra name")
    dfm.add_argument("--expect", choices=("trivial", "obstructed"), default=None)
    dfm.add_argument("--output", default=None)

    return parser


def _cmd_cohomology(args) -> int:
    alg = _resolve_algebra(args.algebra)
    window = parse_window(args.window)
    _check_run_window(window, args.margin)
    if args.stabilize:
        windows = [parse_window(w) for w in args.stabilize.split(",")]
        report = stability_scan(alg, args.degree, args.weight, windows, args.margin,
                                coeffs=args.coefficients)
    else:
        report = cohomology_dim(alg, args.degree, args.weight, window, args.margin,
                                coeffs=args.coefficients)
    _write(emit_report(report, args.format), args.output)
    if args.expect is not None and report.dim_stable != args.expect:
        print(f"expectation failed: dim_stable = {report.dim_stable}, "
              f"expected {args.expect}", file=sys.stderr)
        return 1
    return 0


def _cmd_central(args) -> int:
    window = parse_window(args.window)
    _check_run_window(window, args.margin)
    report = central_extension_dim(window, args.margin)
    _write(emit_report(report, args.format), args.output)
    if args.expect is not None and report.dim_stable != args.expect:
        print(f"expectation failed: dim_stable = {report.dim_stable}, "
              f"expected {args.expect}", file=sys.stderr)
        return 1
    return 0


def _cmd_replay(args) -> int:
    result = run_replay(K=args.K, buffer=args.buffer)
    verdict = result.verdict
    if args.inject_relation:
        key, _, value = args.inject_relation.partition("=")
        rels = result.relations
        rels.add(f"injected[a_{key.strip()}={value.strip()}]", "Diag",
                 SymbolicValue.make({int(key): 1}, const=-Fraction(value.strip())))
        verdict = final_solve(result.table, rels, buffer=args.buffer)
    chunks = []
    if args.emit_table:
        chunks.append(result.section5_table)
    if args.emit_log:
        chunks.append(result.log_text)
    chunks.append(json.dumps(verdict.to_json_dict(), sort_keys=True, indent=2) + "\n")
    chunks.append(str(verdict) + "\n")
    _write("\n".join(chunks), args.output)
    if args.expect is not None and verdict.dimension != args.expect:
        print(f"expectation failed: dimension = {verdict.dimension}, "
              f"expected {args.expect}", file=sys.stderr)
        return 1
    return 0


def _cmd_jacobi(args) -> int:
    alg = _resolve_algebra(args.algebra)
    window = parse_window(args.window)
    report = check_jacobi(alg, window)
    _write(str(report) + "\n", args.output)
    return 0 if report.is_clean else 1


def _cmd_deform(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            doc = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read deformation file {args.file!r}: {exc}") from None
    loader = None
    if args.algebra_file:
        custom = _resolve_algebra(args.algebra_file)

        def loader(name):
            if name != custom.name:
                raise FormatError(
                    f"document names algebra {name!r} but {args.algebra_file} "
                    f"defines {custom.name!r}")
            return custom

    d = parse_deformation(doc, algebra_loader=loader)
    report = jacobi_defect(d, d.window)
    lines = [str(report)]
    outcome = "defective"
    if report.clean:
        try:
            result = trivialize(d, d.window, args.margin)
            lines.append(str(result))
            outcome = "trivial" if result.trivialized else "obstructed"
        except NotACocycleError as exc:
            lines.append(f"not a deformation: {exc}")
    _write("\n".join(lines) + "\n", args.output)
    if args.expect is not None:
        return 0 if outcome == args.expect else 1
    return 0 if outcome == "trivial" else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    handlers = {
        "cohomology": _cmd_cohomology,
        "central-extension": _cmd_central,
        "replay": _cmd_replay,
        "jacobi": _cmd_jacobi,
        "deform": _cmd_deform,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, FormatError, BoundaryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContradictionError as exc:
        print(f"contradiction: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
