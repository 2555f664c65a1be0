"""``qdc`` command line: check, reduce, dump.

Exit codes: 0 all pass, 1 check failure, 2 usage error, 3 budget exhausted
or checks skipped.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import List, Optional

from . import battery
from .budget import BudgetExceeded, time_budget
from .expr import ParseError, format_poly, parse_expr
from .ncalg import PolyMatrix, Polynomial, gen_name
from .presentations import NAMES, default_convention, presentation
from .rewrite import NonTerminationError, UnorientableError
from .rmatrix import CONVENTIONS, build_rhat
from .scalars import to_string

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

_UNITS = {"ms": 1e-3, "s": 1.0, "m": 60.0, "h": 3600.0}


class UsageError(Exception):
    pass


def parse_budget(text: str) -> float:
    """'1s', '250ms', '2m', '1.5h' or a bare number of seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d*)?)\s*(ms|s|m|h)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r} (try 30s, 500ms, 2m)")
    return float(m.group(1)) * _UNITS[m.group(2) or "s"]


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _max_degree(text: str) -> int:
    v = _positive(text)
    if v < 3:
        raise argparse.ArgumentTypeError("overlap checks need max-degree >= 3")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qdc",
        description="Exact verification of quantum-group differential algebras by term rewriting.",
    )
    sub = ap.add_subparsers(dest="verb", required=True, metavar="{check,reduce,dump}")

    def common(p, fmt=True):
        p.add_argument("--n", type=_positive, required=True, help="matrix size N")
        p.add_argument(
            "--convention",
            choices=CONVENTIONS,
            help="R-matrix convention (default: $QDC_CONVENTION or standard)",
        )
        if fmt:
            p.add_argument("--format", choices=("json", "text"), default="text")

    c = sub.add_parser("check", help="run a verification suite")
    common(c)
    c.add_argument("--suite", choices=tuple(battery.SUITES), default="all")
    c.add_argument("--seed", type=int, default=0, help="seed for the permuted-strategy re-reduction")
    c.add_argument("--max-degree", type=_max_degree, default=3, help="overlap degree bound for pbw_overlaps")
    c.add_argument("--budget", type=parse_budget, help="wall-clock budget for the whole suite, e.g. 30s")
    c.add_argument("--heavy", action="store_true", help="also run the W-relation checks for N > 2")
    c.add_argument("--timings", action="store_true", help="include per-check milliseconds in JSON")
    c.add_argument("--no-verify", action="store_true", help="skip the permuted-strategy re-reduction")
    c.add_argument("--mutation", choices=tuple(battery.MUTATIONS), help="run against a mutated constant")

    r = sub.add_parser("reduce", help="print the normal form of an expression")
    common(r)
    r.add_argument("--presentation", choices=NAMES, required=True)
    r.add_argument("--budget", type=parse_budget)
    r.add_argument("--strategy", choices=("leftmost", "random"), default="leftmost")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("expr", help='expression, e.g. "XiX*XiX" or "T[1,2]*T[1,1]"')

    d = sub.add_parser("dump", help="emit the R-matrix, a presentation or its rules as JSON")
    common(d, fmt=False)
    d.add_argument("--rmatrix", action="store_true")
    d.add_argument("--rules", action="store_true", help="with --presentation: dump the compiled rules")
    d.add_argument("--presentation", choices=NAMES)
    return ap


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _convention(args) -> str:
    if args.convention:
        return args.convention
    try:
        return default_convention()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- verbs ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    conv = _convention(args)
    P = None
    if args.mutation:
        P = battery.mutate(battery.params(args.n, conv), args.mutation)
    results = battery.run_suite(
        args.suite,
        args.n,
        conv,
        P=P,
        verify=not args.no_verify,
        seed=args.seed,
        max_degree=args.max_degree,
        heavy=args.heavy,
        budget=args.budget,
    )
    status = battery.aggregate_status(results)
    if args.format == "json":
        _emit(battery.report(results, args.suite, args.n, conv, timings=args.timings))
    else:
        print(f"suite {args.suite}  N={args.n}  convention={conv}")
        for res in results:
            line = f"{res.code:<4} {res.name:<22} {res.status:<5} {res.millis:>7} ms"
            extra = res.reason or res.detail
            if extra:
                line += f"  {extra}"
            print(line)
            if res.witness is not None:
                w = format_poly(res.witness)
                print(f"     witness: {w if len(w) <= 300 else w[:300] + ' ...'}")
        print(f"status: {status}")
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, "skip": EXIT_BUDGET}[status]


def cmd_reduce(args) -> int:
    conv = _convention(args)
    try:
        with time_budget(args.budget):
            pres = presentation(args.presentation, args.n, conv)
            symbols = {k: v for k, v in pres.symbols.items() if isinstance(v, Polynomial)}
            poly = parse_expr(args.expr, args.n, symbols)
            nf = pres.reduce(poly, strategy=args.strategy, seed=args.seed)
    except BudgetExceeded as exc:
        print(f"qdc: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.format == "json":
        _emit({"N": args.n, "convention": conv, "presentation": args.presentation, "normal_form": format_poly(nf)})
    else:
        print(format_poly(nf))
    return EXIT_OK


def _symbol_json(v):
    if isinstance(v, PolyMatrix):
        return [[format_poly(e) for e in row] for row in v.entries]
    return format_poly(v)


def dump_rmatrix(N: int, convention: str) -> dict:
    R = build_rhat(N, convention)
    entries = []
    # [i, j, k, l, value]: row e_i (x) e_j, column e_k (x) e_l, 1-based
    for (r, c), v in sorted(R.entries.items()):
        i, j = divmod(r, N)
        k, l = divmod(c, N)
        entries.append([i + 1, j + 1, k + 1, l + 1, to_string(v)])
    return {"N": N, "convention": convention, "entries": entries}


def dump_presentation(name: str, N: int, convention: str) -> dict:
    pres = presentation(name, N, convention)
    eliminated = [
        {"generator": gen_name(r.lhs[0]), "value": format_poly(Polynomial(dict(r.rhs), N)), "source": r.source}
        for r in pres.rules.rules
        if len(r.lhs) == 1
    ]
    return {
        "name": name,
        "N": N,
        "convention": convention,
        "generators": [gen_name(g) for g in pres.generators],
        "independent_generators": [gen_name(g) for g in pres.independent_generators()],
        "eliminated": eliminated,
        "relations": [
            {"source": tag, "components": [format_poly(c) for c in comps]} for tag, comps in pres.families
        ],
        "symbols": {k: _symbol_json(v) for k, v in pres.symbols.items()},
        "rule_count": len(pres.rules),
    }


def cmd_dump(args) -> int:
    conv = _convention(args)
    if args.rmatrix:
        if args.rules or args.presentation:
            raise UsageError("--rmatrix cannot be combined with --rules/--presentation")
        _emit(dump_rmatrix(args.n, conv))
    elif args.rules:
        if not args.presentation:
            raise UsageError("--rules needs --presentation NAME")
        _emit(presentation(args.presentation, args.n, conv).rules.to_json())
    elif args.presentation:
        _emit(dump_presentation(args.presentation, args.n, conv))
    else:
        raise UsageError("dump needs one of --rmatrix, --presentation NAME, --rules --presentation NAME")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    verbs = {"check": cmd_check, "reduce": cmd_reduce, "dump": cmd_dump}
    try:
        return verbs[args.verb](args)
    except (UsageError, ParseError) as exc:
        print(f"qdc {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # bad N for a presentation, mixed fields and similar input problems
        if isinstance(exc, UnorientableError):
            print(f"qdc: {exc}", file=sys.stderr)
            return EXIT_FAIL
        print(f"qdc {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonTerminationError as exc:
        print(f"qdc: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
