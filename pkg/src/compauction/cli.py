"""Command-line interface.

Exit codes: 0 success (or attainable), 1 negative verdict (violated /
not attainable), 2 usage or input error, 3 internal invariant violation.
Rationals print as exact ``p/q`` strings; pass ``--threads`` (or set
``COMPAUCTION_THREADS``) to chunk the upset scans across worker processes.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction

from compauction import attainability, ratios, serialize, synthesis
from compauction.auctions import check_profile_valid, competitive_ratio
from compauction.benchmarks import limited_supply_bounds
from compauction.grid import DomainTooLargeError
from compauction.serialize import FormatError
from compauction.synthesis import (
    NotAttainableError,
    SynthesisInvariantError,
    TraceRecorder,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _default_threads() -> int:
    raw = os.environ.get("COMPAUCTION_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)


def _parse_ratio(text: str) -> Fraction:
    value = serialize.parse_fraction(text)
    if value < 0:
        raise FormatError(f"ratio must be non-negative, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compauction",
        description="Competitive auctions for digital goods: attainability, "
        "synthesis, evaluation, and benchmark ratios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether a ratio is attainable")
    p.add_argument("benchmark", help="benchmark JSON file")
    p.add_argument("ratio", help="competitive ratio (rational, e.g. 13/6)")
    p.add_argument("--symmetric", action="store_true",
                   help="scan symmetric upsets only (symmetric benchmarks)")
    p.add_argument("--threads", type=int, default=_default_threads())

    p = sub.add_parser("optimal", help="compute the optimal competitive ratio")
    p.add_argument("benchmark")
    p.add_argument("--method", choices=("enumeration", "lp", "both"),
                   default="enumeration")
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--threads", type=int, default=_default_threads())

    p = sub.add_parser("synthesize", help="construct an optimal truthful auction")
    p.add_argument("benchmark")
    p.add_argument("ratio", nargs="?", default=None,
                   help="target ratio (default: the optimal one)")
    p.add_argument("--output", "-o", default="-",
                   help="file for the auction profile JSON ('-' = stdout)")
    p.add_argument("--trace", action="store_true",
                   help="print the step-by-step tables to stdout")

    p = sub.add_parser("evaluate", help="competitive ratio of an auction profile")
    p.add_argument("auction", help="auction profile JSON file")
    p.add_argument("benchmark")

    p = sub.add_parser("ratios", help="table of optimal ratios per bidder count")
    p.add_argument("--max-n", type=int, default=10)

    p = sub.add_parser("simulate", help="Monte-Carlo benchmark expectation")
    p.add_argument("--benchmark", choices=("f2", "maxv"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--blocks", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reduce", help="limited-supply sandwich benchmarks")
    p.add_argument("benchmark")
    p.add_argument("--supply", "-k", type=int, required=True)
    p.add_argument("--upper", help="file for the upper benchmark")
    p.add_argument("--lower", help="file for the lower benchmark")

    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _cmd_check(args) -> int:
    table = serialize.table_from_doc(serialize.load_file(args.benchmark))
    lam = _parse_ratio(args.ratio)
    verdict = attainability.check_attainable(
        table, lam, symmetric_only=args.symmetric, workers=args.threads
    )
    sys.stdout.write(serialize.dumps(serialize.verdict_to_doc(verdict)))
    return EXIT_OK if verdict.attainable else EXIT_NEGATIVE


def _cmd_optimal(args) -> int:
    table = serialize.table_from_doc(serialize.load_file(args.benchmark))
    if args.method == "lp":
        result = attainability.RatioResult(
            attainability.optimal_ratio_lp(table), None, "lp"
        )
    else:
        result = attainability.optimal_ratio(
            table, symmetric_only=args.symmetric, workers=args.threads
        )
        if args.method == "both":
            other = attainability.optimal_ratio_lp(table)
            if other != result.ratio:
                raise SynthesisInvariantError(
                    f"enumeration gives {result.ratio}, LP gives {other}"
                )
            result = attainability.RatioResult(result.ratio, result.witness, "both")
    doc = {
        "lambda": serialize.fraction_to_str(result.ratio),
        "lambda_decimal": float(result.ratio),
        "witness_upset": None
        if result.witness is None
        else [list(p) for p in sorted(result.witness.points)],
        "method": result.method,
    }
    sys.stdout.write(serialize.dumps(doc))
    return EXIT_OK


def _cmd_synthesize(args) -> int:
    table = serialize.table_from_doc(serialize.load_file(args.benchmark))
    if args.ratio is None:
        lam = attainability.optimal_ratio(table).ratio
    else:
        lam = _parse_ratio(args.ratio)
    if args.trace and args.output == "-":
        raise FormatError("--trace needs --output FILE so the trace owns stdout")
    recorder = TraceRecorder(table.grid, lam) if args.trace else None
    revenue = synthesis.synthesize(table, lam, observer=recorder)
    profile = synthesis.x_to_z(revenue)
    if recorder is not None:
        sys.stdout.write(recorder.text())
    _write(args.output, serialize.dumps(serialize.profile_to_doc(profile)))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    profile = serialize.profile_from_doc(serialize.load_file(args.auction))
    table = serialize.table_from_doc(serialize.load_file(args.benchmark))
    if profile.grid != table.grid:
        raise FormatError("auction and benchmark live on different grids")
    ok, witness = check_profile_valid(profile)
    if not ok:
        raise FormatError(f"auction profile is invalid at {witness}")
    report = competitive_ratio(profile, table)
    sys.stdout.write(serialize.dumps(serialize.ratio_to_doc(report)))
    return EXIT_OK


def _cmd_ratios(args) -> int:
    if args.max_n < 2:
        raise FormatError("--max-n must be at least 2")
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        ["n", "lambda_exact", "lambda_decimal", "gamma_exact", "gamma_decimal"]
    )
    for n in range(2, args.max_n + 1):
        lam = ratios.lambda_n(n)
        gam = ratios.gamma_n(n)
        writer.writerow(
            [
                n,
                serialize.fraction_to_str(lam),
                f"{float(lam):.12g}",
                serialize.fraction_to_str(gam),
                f"{float(gam):.12g}",
            ]
        )
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def _cmd_simulate(args) -> int:
    if args.n < 2:
        raise FormatError("--n must be at least 2")
    if args.samples < 1 or args.blocks < 1 or args.samples < args.blocks:
        raise FormatError("need samples >= blocks >= 1")
    stat = ratios.f2_statistic if args.benchmark == "f2" else ratios.maxv_statistic
    estimate, error = ratios.mc_expected(
        stat, args.n, args.samples, args.blocks, seed=args.seed
    )
    if args.benchmark == "f2":
        reference = ratios.lambda_n(args.n) * args.n
    else:
        reference = ratios.expected_maxv(args.n)
    doc = {
        "benchmark": args.benchmark,
        "n": args.n,
        "samples": args.samples,
        "blocks": args.blocks,
        "seed": args.seed,
        "estimate": estimate,
        "error": error,
        "reference": serialize.fraction_to_str(reference),
        "reference_decimal": float(reference),
    }
    sys.stdout.write(serialize.dumps(doc))
    return EXIT_OK


def _cmd_reduce(args) -> int:
    table = serialize.table_from_doc(serialize.load_file(args.benchmark))
    try:
        upper, lower = limited_supply_bounds(table, args.supply)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    upper_doc = serialize.table_to_doc(upper)
    lower_doc = serialize.table_to_doc(lower)
    if args.upper or args.lower:
        if not (args.upper and args.lower):
            raise FormatError("--upper and --lower must be given together")
        _write(args.upper, serialize.dumps(upper_doc))
        _write(args.lower, serialize.dumps(lower_doc))
    else:
        sys.stdout.write(
            serialize.dumps({"upper": upper_doc, "lower": lower_doc})
        )
    return EXIT_OK


_HANDLERS = {
    "check": _cmd_check,
    "optimal": _cmd_optimal,
    "synthesize": _cmd_synthesize,
    "evaluate": _cmd_evaluate,
    "ratios": _cmd_ratios,
    "simulate": _cmd_simulate,
    "reduce": _cmd_reduce,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except (FormatError, DomainTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotAttainableError as exc:
        print(f"not attainable: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (SynthesisInvariantError, synthesis.IterationLimitError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
