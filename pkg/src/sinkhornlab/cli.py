"""Command-line front end.

Subcommands:

* scale     -- run the alternating scaling iteration
* rc-scale  -- scaling toward explicit row/column margin targets
* limit     -- closed-form limits (general 2x2, symmetric, bordered family)
* classify  -- exact 0/1/2/infinite termination verdict for a 2x2 matrix
* trace     -- per-step margin-error CSV for convergence studies
* search    -- catalog small integer matrices with finite exact termination

Matrices are given inline ('1,3;3,4': rows split by ';', entries by ',',
rationals as 'p/q', decimals allowed) or as a path to a JSON file of the
form {"rows": [[...]]} where plain numbers mean the approximate regime
and "p/q" strings the exact one. Under --exact, decimal entries are
expanded exactly (0.25 -> 1/4), never round-tripped through a float.

Exit codes: 0 success, 1 malformed input or inconsistent flags, 2
iteration budget exhausted (scale/rc-scale).

SINKHORNLAB_TOLERANCE overrides the default approximate tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from .classify import (
    Termination,
    TerminationClass,
    classify_2x2,
    classify_both_orders,
)
from .closed_form import (
    bordered_limit,
    bordered_limit_triangular,
    limit_2x2,
    limit_2x2_exact,
    limit_2x2_symmetric,
)
from .engine import (
    IterationConfig,
    SinkhornResult,
    StartSide,
    Status,
    finite_termination_search,
    rc_sinkhorn,
    sinkhorn,
    trace_csv,
)
from .matrices import (
    DimensionError,
    MarginTarget,
    NonPositiveEntryError,
    PositiveMatrix,
    RegimeError,
)
from .numerics import format_rational, parse_rational

TOLERANCE_ENV_VAR = "SINKHORNLAB_TOLERANCE"

_ROW_BRACKETS = re.compile(r"\]\s*[,;]?\s*\[")


class CliError(ValueError):
    """Bad input or inconsistent flags; maps to exit code 1."""


def _parse_inline(text: str, exact: bool) -> PositiveMatrix:
    s = _ROW_BRACKETS.sub(";", text.strip())
    s = s.replace("[", "").replace("]", "")
    rows = [r for r in s.split(";") if r.strip()]
    if not rows:
        raise CliError(f"empty matrix: {text!r}")
    parsed = [[parse_rational(e) for e in row.split(",")] for row in rows]
    if exact:
        return PositiveMatrix(parsed)
    return PositiveMatrix([[float(x) for x in row] for row in parsed])


def read_matrix(source: str, exact: bool) -> PositiveMatrix:
    """Load a matrix from a JSON file path or inline text.

    Inline text is exact iff requested. A JSON file infers its regime
    from entry types unless --exact forces exact parsing.
    """
    if os.path.isfile(source):
        text = Path(source).read_text()
        if exact:
            obj = json.loads(text, parse_float=str, parse_int=str)
        else:
            obj = json.loads(text)
        return PositiveMatrix.from_json_obj(obj)
    return _parse_inline(source, exact)


def _parse_targets(row_text: str, col_text: str, exact: bool) -> MarginTarget:
    rows = [parse_rational(x) for x in row_text.split(",")]
    cols = [parse_rational(x) for x in col_text.split(",")]
    if not exact:
        rows = [float(x) for x in rows]
        cols = [float(x) for x in cols]
    return MarginTarget(rows, cols)


def _fmt(x) -> str:
    return format_rational(x) if isinstance(x, Fraction) else repr(float(x))


def _fmt_matrix(M: PositiveMatrix, indent: str = "  ") -> str:
    cells = [[_fmt(x) for x in row] for row in M.entries]
    widths = [max(len(cells[i][j]) for i in range(M.rows)) for j in range(M.cols)]
    return "\n".join(
        indent + "  ".join(cell.rjust(w) for cell, w in zip(row, widths))
        for row in cells
    )


def _matrix_inline(M: PositiveMatrix) -> str:
    return ";".join(",".join(_fmt(x) for x in row) for row in M.entries)


def _json_scalar(x):
    return format_rational(x) if isinstance(x, Fraction) else float(x)


def _json_rows(M: PositiveMatrix):
    return M.to_json_obj()["rows"]


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _resolve_tolerance(args, exact: bool) -> float | None:
    tol = getattr(args, "tol", None)
    if tol is not None:
        return tol
    if not exact and TOLERANCE_ENV_VAR in os.environ:
        try:
            return float(os.environ[TOLERANCE_ENV_VAR])
        except ValueError as exc:
            raise CliError(
                f"{TOLERANCE_ENV_VAR} is not a number: {os.environ[TOLERANCE_ENV_VAR]!r}"
            ) from exc
    return None


def _iteration_config(args, exact: bool) -> IterationConfig:
    return IterationConfig(
        start_side=StartSide.COLUMN_FIRST if args.start_side == "column" else StartSide.ROW_FIRST,
        max_steps=args.max_steps,
        tolerance=_resolve_tolerance(args, exact),
    )


def _status_line(res: SinkhornResult) -> str:
    if res.status is Status.TERMINATED_FINITE:
        return f"terminated finitely, L = {res.steps_taken}"
    if res.status is Status.CONVERGED:
        return f"converged within tolerance after {res.steps_taken} steps"
    return f"max steps reached after {res.steps_taken} steps"


def _render_scale(res: SinkhornResult, mode: str, fmt: str, command: str) -> int:
    if fmt == "json":
        _emit_json(
            {
                "command": command,
                "mode": mode,
                "status": res.status.value,
                "steps": res.steps_taken,
                "limit": {"rows": _json_rows(res.limit)},
                "left": [_json_scalar(x) for x in res.left_accum.diag],
                "right": [_json_scalar(x) for x in res.right_accum.diag],
            }
        )
    else:
        print(f"mode: {mode}")
        print(f"status: {_status_line(res)}")
        print("limit:")
        print(_fmt_matrix(res.limit))
        print(f"left scaling:  diag({', '.join(_fmt(x) for x in res.left_accum.diag)})")
        print(f"right scaling: diag({', '.join(_fmt(x) for x in res.right_accum.diag)})")
    return 0 if res.status in (Status.TERMINATED_FINITE, Status.CONVERGED) else 2


def cmd_scale(args) -> int:
    A = read_matrix(args.matrix, args.exact)
    cfg = _iteration_config(args, A.exact)
    res = sinkhorn(A, cfg)
    return _render_scale(res, "exact" if A.exact else "approximate", args.format, "scale")


def cmd_rc_scale(args) -> int:
    A = read_matrix(args.matrix, args.exact)
    target = _parse_targets(args.row_targets, args.col_targets, A.exact)
    cfg = _iteration_config(args, A.exact)
    res = rc_sinkhorn(A, target, cfg)
    return _render_scale(res, "exact" if A.exact else "approximate", args.format, "rc-scale")


def _render_verdict(v: TerminationClass) -> None:
    length = "infinite" if v.length is None else f"L = {v.length}"
    print(f"verdict: {v.variant.value} ({length})")
    print(f"start side: {v.start_side.value}")
    if v.params:
        print("parameters: " + ", ".join(f"{k} = {_fmt(val)}" for k, val in v.params.items()))
    if v.limit is not None:
        print("limit:")
        print(_fmt_matrix(v.limit))


def _verdict_json(v: TerminationClass):
    return {
        "verdict": v.variant.value,
        "length": v.length,
        "start_side": v.start_side.value,
        "params": {k: format_rational(val) for k, val in v.params.items()},
        "limit": None if v.limit is None else {"rows": _json_rows(v.limit)},
    }


def _closed_form_note(A: PositiveMatrix):
    (a, b), (c, d) = A.entries
    exact = limit_2x2_exact(a, b, c, d)
    if exact.is_rational:
        return (
            f"closed-form limit: alpha = {exact.alpha}, beta = {exact.beta}",
            {"alpha": str(exact.alpha), "beta": str(exact.beta), "rational": True},
        )
    return (
        f"closed-form limit is irrational: ad/bc = {exact.ratio} is not a rational square",
        {"ratio": str(exact.ratio), "rational": False},
    )


def cmd_classify(args) -> int:
    converted = "." in args.matrix or (
        os.path.isfile(args.matrix) and "." in Path(args.matrix).read_text()
    )
    A = read_matrix(args.matrix, exact=True)
    if (A.rows, A.cols) != (2, 2):
        raise CliError(
            f"termination classification is defined for 2x2 matrices only "
            f"(got {A.rows}x{A.cols}); whether larger matrices admit finite "
            f"termination bounds is an open problem -- try 'search' instead"
        )
    side = StartSide.COLUMN_FIRST if args.start_side == "column" else StartSide.ROW_FIRST
    note = "note: decimal entries were converted to exact rationals" if converted else None

    if args.both_orders:
        comparison = classify_both_orders(A)
        if args.format == "json":
            obj = {
                "command": "classify",
                "column_first": _verdict_json(comparison.column_first),
                "row_first": _verdict_json(comparison.row_first),
                "step_difference": comparison.step_difference,
            }
            if comparison.column_first.variant is Termination.INFINITE:
                obj["closed_form"] = _closed_form_note(A)[1]
            _emit_json(obj)
        else:
            if note:
                print(note)
            for v in (comparison.row_first, comparison.column_first):
                _render_verdict(v)
                print()
            if comparison.step_difference is not None:
                print(f"step difference |N1 - N2| = {comparison.step_difference}")
            else:
                print("step difference |N1 - N2| undefined (not both finite)")
            if comparison.column_first.variant is Termination.INFINITE:
                print(_closed_form_note(A)[0])
        return 0

    verdict = classify_2x2(A, side)
    if args.format == "json":
        obj = {"command": "classify", **_verdict_json(verdict)}
        if verdict.variant is Termination.INFINITE:
            obj["closed_form"] = _closed_form_note(A)[1]
        _emit_json(obj)
    else:
        if note:
            print(note)
        _render_verdict(verdict)
        if verdict.variant is Termination.INFINITE:
            print(_closed_form_note(A)[0])
    return 0


def cmd_limit(args) -> int:
    chosen = sum(bool(x) for x in (args.bordered, args.triangular, args.matrix))
    if chosen != 1:
        raise CliError(
            "pass exactly one of: a 2x2 matrix, --bordered N K, or --triangular k"
        )

    if args.bordered:
        n = int(args.bordered[0])
        K = float(parse_rational(args.bordered[1]))
        lim = bordered_limit(n, K)
        if args.format == "json":
            _emit_json(
                {
                    "command": "limit",
                    "family": "bordered",
                    "n": n,
                    "K": K,
                    "alpha": lim.alpha,
                    "beta": lim.beta,
                    "gamma": lim.gamma,
                    "x1": lim.x1,
                    "x2": lim.x2,
                }
            )
        else:
            print(f"bordered family: n = {n}, K = {_fmt(K)}")
            print(f"alpha = {lim.alpha!r}")
            print(f"beta  = {lim.beta!r}")
            print(f"gamma = {lim.gamma!r}")
            print(f"scaler: diag(x1, x2, ..., x2) with x1 = {lim.x1!r}, x2 = {lim.x2!r}")
        return 0

    if args.triangular:
        lim = bordered_limit_triangular(args.triangular)
        if args.format == "json":
            _emit_json(
                {
                    "command": "limit",
                    "family": "triangular",
                    "k": args.triangular,
                    "K": str(lim.K),
                    "alpha": str(lim.alpha),
                    "beta": str(lim.beta),
                    "gamma": str(lim.gamma),
                }
            )
        else:
            print(f"triangular family: k = {args.triangular}, K = {lim.K}")
            print(f"alpha = {lim.alpha} (exact)")
            print(f"beta  = {lim.beta} (exact)")
            print(f"gamma = {lim.gamma} (exact)")
        return 0

    A = read_matrix(args.matrix, args.exact)
    if (A.rows, A.cols) != (2, 2):
        raise CliError(
            f"closed forms cover 2x2 matrices (got {A.rows}x{A.cols}); "
            f"use --bordered N K for the bordered n x n family"
        )
    (a, b), (c, d) = A.entries

    if args.symmetric:
        if b != c:
            raise CliError("--symmetric needs a symmetric matrix (entry (1,2) = entry (2,1))")
        lim = limit_2x2_symmetric(float(a), float(b), float(d))
        if args.format == "json":
            _emit_json(
                {
                    "command": "limit",
                    "family": "symmetric",
                    "alpha": lim.alpha,
                    "beta": lim.beta,
                    "lambda": lim.lam,
                    "scaler": [float(x) for x in lim.scaler.diag],
                    "limit": {"rows": _json_rows(lim.matrix())},
                }
            )
        else:
            print(f"alpha = {lim.alpha!r}")
            print(f"beta  = {lim.beta!r}")
            print(f"lambda = {lim.lam!r}")
            print(f"scaler: diag({', '.join(repr(float(x)) for x in lim.scaler.diag)})")
            print("limit:")
            print(_fmt_matrix(lim.matrix()))
        return 0

    if args.exact:
        lim = limit_2x2_exact(a, b, c, d)
        if args.format == "json":
            _emit_json(
                {
                    "command": "limit",
                    "family": "exact-2x2",
                    "rational": lim.is_rational,
                    "ratio": str(lim.ratio),
                    "alpha": None if lim.alpha is None else str(lim.alpha),
                    "beta": None if lim.beta is None else str(lim.beta),
                }
            )
        elif lim.is_rational:
            print(f"alpha = {lim.alpha} (exact)")
            print(f"beta  = {lim.beta} (exact)")
            print("limit:")
            print(_fmt_matrix(lim.matrix()))
        else:
            print(f"irrational: ad/bc = {lim.ratio} is not a rational square")
        return 0

    lim = limit_2x2(float(a), float(b), float(c), float(d))
    if args.format == "json":
        _emit_json(
            {
                "command": "limit",
                "family": "general-2x2",
                "alpha": lim.alpha,
                "beta": lim.beta,
                "left": [float(x) for x in lim.left.diag],
                "right": [float(x) for x in lim.right.diag],
                "limit": {"rows": _json_rows(lim.matrix())},
            }
        )
    else:
        print(f"alpha = {lim.alpha!r}")
        print(f"beta  = {lim.beta!r}")
        print(f"left scaling:  diag({', '.join(repr(float(x)) for x in lim.left.diag)})")
        print(f"right scaling: diag({', '.join(repr(float(x)) for x in lim.right.diag)})")
        print("limit:")
        print(_fmt_matrix(lim.matrix()))
    return 0


def cmd_trace(args) -> int:
    A = read_matrix(args.matrix, args.exact)
    cfg = IterationConfig(
        start_side=StartSide.COLUMN_FIRST if args.start_side == "column" else StartSide.ROW_FIRST,
        max_steps=args.steps,
        tolerance=_resolve_tolerance(args, A.exact),
    )
    res = sinkhorn(A, cfg)
    sys.stdout.write(trace_csv(res.trace, A.exact))
    return 0


def cmd_search(args) -> int:
    side = StartSide.COLUMN_FIRST if args.start_side == "column" else StartSide.ROW_FIRST
    hits = finite_termination_search(
        args.n,
        args.bound,
        start_side=side,
        max_steps=args.max_steps,
        normalize_rows=args.normalize_rows,
        entry_bits_cap=args.bits_cap,
        candidate_cap=args.candidate_cap,
    )
    histogram: dict[int, int] = {}
    for hit in hits:
        histogram[hit.length] = histogram.get(hit.length, 0) + 1
    total = args.bound ** (args.n * args.n)
    if args.format == "json":
        _emit_json(
            {
                "command": "search",
                "n": args.n,
                "bound": args.bound,
                "candidates": total,
                "hits": [
                    {
                        "matrix": {"rows": _json_rows(h.matrix)},
                        "length": h.length,
                        "limit": {"rows": _json_rows(h.limit)},
                    }
                    for h in hits
                ],
                "histogram": {str(k): v for k, v in sorted(histogram.items())},
            }
        )
    else:
        for h in hits:
            print(f"{_matrix_inline(h.matrix)}  ->  L = {h.length}, limit {_matrix_inline(h.limit)}")
        print(f"candidates: {total}, finite terminations: {len(hits)}")
        for L in sorted(histogram):
            print(f"  L = {L}: {histogram[L]}")
    return 0


def _add_matrix_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("matrix", help="inline matrix 'a,b;c,d' or path to a JSON file")


def _add_iteration_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--exact", action="store_true", help="exact rational regime")
    p.add_argument("--start-side", choices=("column", "row"), default="column")
    p.add_argument("--max-steps", type=int, default=None, help="step budget (default 10000 approximate / 64 exact)")
    p.add_argument("--tol", type=float, default=None, help="margin tolerance (approximate regime)")


def _add_format_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("human", "json"), default="human")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sinkhornlab",
        description="Alternating row/column scaling of positive matrices: "
        "iteration, closed-form limits, exact termination classification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scale", help="run the scaling iteration")
    _add_matrix_arg(p)
    _add_iteration_flags(p)
    _add_format_flag(p)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("rc-scale", help="scaling toward margin targets r and c")
    _add_matrix_arg(p)
    p.add_argument("--row-targets", required=True, help="comma-separated row sums r")
    p.add_argument("--col-targets", required=True, help="comma-separated column sums c")
    _add_iteration_flags(p)
    _add_format_flag(p)
    p.set_defaults(func=cmd_rc_scale)

    p = sub.add_parser("limit", help="evaluate a closed-form limit")
    p.add_argument("matrix", nargs="?", default=None)
    p.add_argument("--exact", action="store_true", help="exact rational 2x2 limit or irrationality witness")
    p.add_argument("--symmetric", action="store_true", help="symmetric 2x2 form with a single scaler D")
    p.add_argument("--bordered", nargs=2, metavar=("N", "K"), default=None, help="bordered n x n family")
    p.add_argument("--triangular", type=int, metavar="k", default=None, help="exact rational bordered family, K = k(k+1)/2")
    _add_format_flag(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("classify", help="exact 2x2 termination verdict")
    _add_matrix_arg(p)
    p.add_argument("--start-side", choices=("column", "row"), default="column")
    p.add_argument("--both-orders", action="store_true", help="classify under both start orders")
    _add_format_flag(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("trace", help="per-step margin-error CSV on stdout")
    _add_matrix_arg(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--start-side", choices=("column", "row"), default="column")
    p.add_argument("--steps", type=int, default=None, help="step budget")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("search", help="catalog finite-termination integer matrices")
    p.add_argument("--n", type=int, required=True, help="matrix size (n >= 2)")
    p.add_argument("--bound", type=int, required=True, help="largest integer entry")
    p.add_argument("--start-side", choices=("column", "row"), default="column")
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--normalize-rows", action="store_true", help="divide each candidate's rows by their sums first")
    p.add_argument("--bits-cap", type=int, default=4096, help="drop candidates whose entries exceed this bit size")
    p.add_argument("--candidate-cap", type=int, default=10_000_000, help="refuse enumerations larger than this")
    _add_format_flag(p)
    p.set_defaults(func=cmd_search)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, NonPositiveEntryError, DimensionError, RegimeError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
