"""Command-line interface.

Commands: spectrum | rigidity | torsion | surgery | bounds | oracle | verify.
Graph arguments are JSON document paths or "builtin:NAME" for a graph from
the built-in suite. Numeric output is canonical (17 significant digits,
fixed field order), so identical inputs and flags produce byte-identical
reports.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 solver warning
under --strict, 4 surgery precondition failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, suite
from .analytic import extremal_bounds
from .fractional import rigidity, simple_bounds, torsion_at
from .graph import GraphPoint, InvalidGraphError, MetricGraph, total_length, validate
from .oracle import OracleSizeError, fd_rigidity, fd_spectrum, richardson
from .serialize import (
    DocumentError,
    dumps_canonical,
    format_float,
    graph_to_document,
    load_graph_file,
)
from .solver import SolverOptions, scan_n_eigenvalues, scan_spectrum
from .surgery import SurgeryPreconditionError, apply as apply_surgery
from .verify import run_battery

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_WARNING = 3
EXIT_PRECONDITION = 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _load_graph(spec: str) -> MetricGraph:
    if spec.startswith("builtin:"):
        try:
            g = suite.builtin(spec[len("builtin:"):])
        except KeyError as exc:
            raise CliError(str(exc)) from exc
    else:
        try:
            g = load_graph_file(spec)
        except OSError as exc:
            raise CliError(f"cannot read {spec!r}: {exc}") from exc
        except DocumentError as exc:
            raise CliError(f"malformed graph document {spec!r}: {exc}") from exc
    report = validate(g)
    if report:
        raise CliError(f"invalid graph {spec!r}: " + "; ".join(report))
    return g


def _parse_alphas(text: str) -> list[float]:
    out: list[float] = []
    for chunk in text.split(","):
        try:
            a = float(chunk)
        except ValueError as exc:
            raise CliError(f"bad alpha value {chunk!r}") from exc
        if not (0.0 < a <= 1.0):
            raise CliError(f"alpha must be in (0, 1], got {chunk!r}")
        if a in out:
            print(f"warning: duplicate alpha {a:g} ignored", file=sys.stderr)
            continue
        out.append(a)
    if not out:
        raise CliError("empty alpha list")
    return out


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        oversample=args.oversample,
        accept_tol=args.tol,
        mult_tol=args.mult_tol,
        refine_width=args.refine_width,
    )


def _scan(g: MetricGraph, args):
    opts = _solver_options(args)
    if args.kmax is not None and args.n_eigs is not None:
        raise CliError("give exactly one of --kmax and --n-eigs, not both")
    if args.kmax is not None:
        if args.kmax <= 0:
            raise CliError("--kmax must be positive")
        basis = scan_spectrum(g, args.kmax, opts)
    elif args.n_eigs is not None:
        if args.n_eigs < 1:
            raise CliError("--n-eigs must be at least 1")
        basis = scan_n_eigenvalues(g, args.n_eigs, opts)
    else:
        raise CliError("give exactly one of --kmax and --n-eigs")
    for w in basis.warnings:
        print(f"solver warning: {w}", file=sys.stderr)
    if basis.warnings and args.strict:
        raise CliError("solver warnings escalated by --strict", EXIT_WARNING)
    return basis


def _config_dict(basis) -> dict:
    o = basis.options
    return {
        "kmax": basis.kmax,
        "oversample": o.oversample,
        "accept_tol": o.accept_tol,
        "mult_tol": o.mult_tol,
        "refine_width": o.refine_width,
    }


def _graph_summary(g: MetricGraph) -> dict:
    return {
        "n_vertices": len(g.vertices),
        "n_edges": len(g.edges),
        "total_length": total_length(g),
        "dirichlet": list(g.dirichlet),
    }


def _emit(text: str, args) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: list[list[str]]) -> str:
    return "".join(",".join(row) + "\n" for row in rows)


def cmd_spectrum(args) -> int:
    g = _load_graph(args.graph)
    basis = _scan(g, args)
    rows = []
    mult_index = 0
    last_k = None
    for n, p in enumerate(basis.pairs, start=1):
        mult_index = mult_index + 1 if p.k == last_k else 1
        last_k = p.k
        rows.append({"n": n, "k": p.k, "lambda": p.lam, "mult_index": mult_index, "mass": p.mass})
    if args.format == "csv":
        table = [["n", "k", "lambda", "mult_index", "mass"]]
        for r in rows:
            table.append(
                [str(r["n"]), format_float(r["k"]), format_float(r["lambda"]),
                 str(r["mult_index"]), format_float(r["mass"])]
            )
        _emit(_csv(table), args)
    else:
        report = {
            "schema_version": "1",
            "command": "spectrum",
            "graph": _graph_summary(g),
            "config": _config_dict(basis),
            "captured_mass": basis.captured_mass,
            "next_lambda": basis.next_lambda,
            "rows": rows,
        }
        _emit(dumps_canonical(report) + "\n", args)
    return EXIT_OK


def cmd_rigidity(args) -> int:
    g = _load_graph(args.graph)
    alphas = _parse_alphas(args.alpha)
    basis = _scan(g, args)
    results = []
    for alpha in alphas:
        r = rigidity(basis, alpha)
        bounds = extremal_bounds(g, alpha)
        lo, up = simple_bounds(basis, alpha)
        violations = []
        if r.value + r.tail_bound < bounds.lower - 1e-8:
            violations.append("below flower lower bound")
        if r.value > bounds.upper + r.tail_bound:
            violations.append("above interval upper bound")
        if r.value < lo - 1e-8:
            violations.append("below first-mode lower bound")
        if r.value > up + 1e-8:
            violations.append("above Bessel upper bound")
        results.append(
            {
                "alpha": alpha,
                "value": r.value,
                "tail_bound": r.tail_bound,
                "n_terms": r.n_terms,
                "lower": bounds.lower,
                "upper": bounds.upper,
                "simple_lower": lo,
                "simple_upper": up,
                "violations": violations,
            }
        )
    if args.format == "csv":
        table = [[
            "alpha", "value", "tail_bound", "n_terms", "lower", "upper",
            "simple_lower", "simple_upper", "violations",
        ]]
        for r in results:
            table.append(
                [format_float(r["alpha"]), format_float(r["value"]), format_float(r["tail_bound"]),
                 str(r["n_terms"]), format_float(r["lower"]), format_float(r["upper"]),
                 format_float(r["simple_lower"]), format_float(r["simple_upper"]),
                 ";".join(r["violations"])]
            )
        _emit(_csv(table), args)
    else:
        report = {
            "schema_version": "1",
            "command": "rigidity",
            "graph": _graph_summary(g),
            "config": _config_dict(basis),
            "results": results,
        }
        _emit(dumps_canonical(report) + "\n", args)
    if any(r["violations"] for r in results):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_torsion(args) -> int:
    g = _load_graph(args.graph)
    alphas = _parse_alphas(args.alpha)
    if len(alphas) != 1:
        raise CliError("torsion takes exactly one --alpha value")
    alpha = alphas[0]
    if args.samples_per_edge < 2:
        raise CliError("--samples-per-edge must be at least 2")
    basis = _scan(g, args)
    lines = []
    if alpha <= 0.5:
        lines.append(
            ["# warning: alpha <= 0.5, pointwise error estimates are heuristic only"]
        )
    lines.append(["edge", "s", "u_alpha", "error_estimate"])
    m = args.samples_per_edge
    for e in g.edges:
        for i in range(m):
            s = e.length * i / (m - 1)
            sample = torsion_at(basis, alpha, GraphPoint(e.id, s))
            lines.append(
                [e.id, format_float(s), format_float(sample.value), format_float(sample.error_estimate)]
            )
    _emit(_csv(lines), args)
    return EXIT_OK


def cmd_surgery(args) -> int:
    g = _load_graph(args.graph)
    try:
        op = apply_surgery(g, args.op, dirichlet_mode=args.unfold_dirichlet)
    except SurgeryPreconditionError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from exc
    except (ValueError, KeyError) as exc:
        raise CliError(str(exc)) from exc
    doc = graph_to_document(op.graph, provenance=op.provenance)
    _emit(dumps_canonical(doc) + "\n", args)
    if args.check:
        alphas = _parse_alphas(args.alpha) if args.alpha else [1.0]
        basis_in = _scan(g, args)
        basis_out = _scan(op.graph, args)
        for alpha in alphas:
            r_in = rigidity(basis_in, alpha)
            r_out = rigidity(basis_out, alpha)
            tol = r_in.tail_bound + r_out.tail_bound + 1e-8
            kind = op.kind.split(":")[0]
            if kind == "double":
                ok = r_in.value <= r_out.value / 2.0 + tol
                relation = f"T(G) = {format_float(r_in.value)} <= T'/2 = {format_float(r_out.value / 2.0)}"
            elif kind == "glue":
                ok = r_out.value <= r_in.value + tol
                relation = f"T(G') = {format_float(r_out.value)} <= T(G) = {format_float(r_in.value)}"
            elif kind == "unfold":
                ok = r_in.value <= r_out.value + tol
                relation = f"T(G) = {format_float(r_in.value)} <= T(C) = {format_float(r_out.value)}"
            else:
                ok = abs(r_in.value - r_out.value) <= tol
                relation = f"T(C) = {format_float(r_in.value)} == T(I) = {format_float(r_out.value)}"
            verdict = "holds" if ok else "VIOLATED"
            print(f"check {op.kind} alpha={alpha:g}: {relation} (tol {tol:.3g}): {verdict}",
                  file=sys.stderr)
            if not ok:
                return EXIT_VERIFY
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = _load_graph(args.graph)
    alphas = _parse_alphas(args.alpha)
    results = []
    for alpha in alphas:
        b = extremal_bounds(g, alpha)
        results.append({"alpha": alpha, "lower": b.lower, "upper": b.upper})
    if args.format == "csv":
        table = [["alpha", "lower", "upper"]]
        for r in results:
            table.append([format_float(r["alpha"]), format_float(r["lower"]), format_float(r["upper"])])
        _emit(_csv(table), args)
    else:
        report = {
            "schema_version": "1",
            "command": "bounds",
            "graph": _graph_summary(g),
            "results": results,
        }
        _emit(dumps_canonical(report) + "\n", args)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _load_graph(args.graph)
    alphas = _parse_alphas(args.alpha)
    try:
        results = []
        for alpha in alphas:
            v_h = fd_rigidity(g, args.h, alpha)
            v_h2 = fd_rigidity(g, args.h / 2.0, alpha)
            results.append(
                {
                    "alpha": alpha,
                    "h": args.h,
                    "value_h": v_h,
                    "value_h2": v_h2,
                    "richardson": richardson(v_h, v_h2),
                }
            )
        spectrum = None
        if args.n_eigs:
            spectrum = [float(m) for m in fd_spectrum(g, args.h, args.n_eigs)]
    except OracleSizeError as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.format == "csv":
        table = [["alpha", "h", "value_h", "value_h2", "richardson"]]
        for r in results:
            table.append(
                [format_float(r["alpha"]), format_float(r["h"]), format_float(r["value_h"]),
                 format_float(r["value_h2"]), format_float(r["richardson"])]
            )
        _emit(_csv(table), args)
    else:
        report = {
            "schema_version": "1",
            "command": "oracle",
            "graph": _graph_summary(g),
            "results": results,
        }
        if spectrum is not None:
            report["spectrum"] = spectrum
        _emit(dumps_canonical(report) + "\n", args)
    return EXIT_OK


def cmd_verify(args) -> int:
    alphas = _parse_alphas(args.alpha) if args.alpha else [0.5, 1.0]
    results = run_battery(alphas=alphas, perturb=args.selftest_perturb)
    failures = [r for r in results if not r.passed]
    if args.format == "json":
        report = {
            "schema_version": "1",
            "command": "verify",
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
            "n_checks": len(results),
            "n_failures": len(failures),
        }
        _emit(dumps_canonical(report) + "\n", args)
    else:
        out = []
        for r in results:
            out.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        out.append(f"{len(results) - len(failures)}/{len(results)} checks passed")
        _emit("\n".join(out) + "\n", args)
    return EXIT_VERIFY if failures else EXIT_OK


def _add_solver_flags(p) -> None:
    p.add_argument("--kmax", type=float, default=None, help="scan wavenumbers up to this ceiling")
    p.add_argument("--n-eigs", type=int, default=None, help="scan until this many eigenvalues are found")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="accept a root when sigma_min < tol * ||M|| (default 1e-8)")
    p.add_argument("--mult-tol", type=float, default=1e-6,
                   help="relative singular value threshold for multiplicity (default 1e-6)")
    p.add_argument("--refine-width", type=float, default=1e-13,
                   help="relative bracket width for root refinement (default 1e-13)")
    p.add_argument("--oversample", type=float, default=1.0, help="scan grid densification factor")
    p.add_argument("--strict", action="store_true", help="escalate solver warnings to exit code 3")


def _add_output_flags(p) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphtorsion",
        description="Spectra and fractional torsion of compact metric graphs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues, multiplicities and mass coefficients")
    p.add_argument("graph", help="graph document path or builtin:NAME")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("rigidity", help="torsional rigidity with tail and sandwich bounds")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True, help="comma list of exponents in (0, 1]")
    _add_solver_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("torsion", help="sample the torsion function along every edge (CSV)")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    p.add_argument("--samples-per-edge", type=int, default=9)
    _add_solver_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_torsion, format="csv")

    p = sub.add_parser("surgery", help="transform a graph and optionally check the comparison")
    p.add_argument("graph")
    p.add_argument("--op", required=True, help="double | glue:v1,v2[,..] | unfold | cut:v")
    p.add_argument("--unfold-dirichlet", choices=("all", "single"), default="all",
                   help="mark every Dirichlet visit on the cycle, or only the start")
    p.add_argument("--check", action="store_true",
                   help="also compute both rigidities and report the inequality")
    p.add_argument("--alpha", default=None)
    _add_solver_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("bounds", help="closed-form flower/interval rigidity bounds")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle", help="finite-difference rigidity with Richardson extrapolation")
    p.add_argument("graph")
    p.add_argument("--alpha", required=True)
    p.add_argument("--h", type=float, default=0.01, help="target mesh width (default 0.01)")
    p.add_argument("--n-eigs", type=int, default=None, help="also report this many discrete eigenvalues")
    _add_output_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run the built-in verification battery")
    p.add_argument("--alpha", default=None, help="comma list (default 0.5,1.0)")
    p.add_argument("--selftest-perturb", type=float, default=0.0,
                   help="test hook: scale eigenvalues to prove violations are detected")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidGraphError as exc:
        print(f"error: invalid graph: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
