"""Command-line interface.

Exit codes: 0 success, 1 property failure, 2 usage or parse error,
3 fuel exhausted, 4 stuck state.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from ..naive import apply_replacement, tau_normalize
from ..oracle import PROPERTIES, GenSpec, check_property
from ..deepstack import call_deep
from ..rewrite import FuelExhausted, default_fuel
from ..sigma import sigma_normalize, sigmatau_normalize
from . import demos
from .parser import ParseError, parse_term
from .printer import print_term, print_trail
from .trace import ENGINES, EngineStuck, reduce_term, write_trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FUEL, EXIT_STUCK = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _source(args) -> str:
    if getattr(args, "expr", None) is not None:
        return args.expr
    if args.file in (None, "-"):
        return sys.stdin.read()
    with open(args.file, encoding="utf-8") as fh:
        return fh.read()


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="source file ('-' for stdin)")
    p.add_argument("-e", "--expr", help="term given inline instead of a file")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cau", description="Audited lambda calculus toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="echo the elaborated term")
    _add_input(p)

    p = sub.add_parser("reduce", help="reduce a term with one of the engines")
    _add_input(p)
    p.add_argument("--engine", choices=ENGINES, default="naive")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", metavar="FILE.jsonl", help="write a JSON Lines trace")

    p = sub.add_parser("normalize", help="normalize under tau, sigma or sigma-tau")
    _add_input(p)
    p.add_argument("--rules", choices=("tau", "sigma", "sigmatau"), default="sigmatau")

    p = sub.add_parser("inspect-count", help="count contractions in the final bang trail")
    _add_input(p)
    p.add_argument("--max-steps", type=int, default=None)

    p = sub.add_parser("check", help="run a named property")
    p.add_argument("--property", required=True, choices=sorted(PROPERTIES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--random", action="store_true", help="force random trials even for small sizes")
    p.add_argument("--json", action="store_true", help="print the machine-readable summary")

    p = sub.add_parser("demo", help="golden reproductions of the worked examples")
    p.add_argument("name", choices=("fig1", "example1", "example2", "example3", "example4"))
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return call_deep(_dispatch, args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FuelExhausted as exc:
        print(f"fuel exhausted: {exc}", file=sys.stderr)
        return EXIT_FUEL
    except EngineStuck as exc:
        print(f"stuck: {exc}", file=sys.stderr)
        return EXIT_STUCK
    except RecursionError:
        print("error: recursion too deep", file=sys.stderr)
        return EXIT_FUEL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "parse":
        print(print_term(parse_term(_source(args))))
        return EXIT_OK
    if cmd == "reduce":
        M = parse_term(_source(args))
        rows: list = []
        try:
            result = reduce_term(M, args.engine, args.max_steps, rows=rows if args.trace else None,
                                 denote=bool(args.trace))
        finally:
            if args.trace:
                with open(args.trace, "w", encoding="utf-8") as fh:
                    write_trace(rows, fh)
        print(print_term(result))
        return EXIT_OK
    if cmd == "normalize":
        M = parse_term(_source(args))
        norm = {"tau": tau_normalize, "sigma": sigma_normalize, "sigmatau": sigmatau_normalize}[args.rules]
        print(print_term(norm(M)))
        return EXIT_OK
    if cmd == "inspect-count":
        M = parse_term(_source(args))
        result = demos.normalize_full(M, args.max_steps or default_fuel())
        q = demos.final_bang_trail(result)
        counted = demos.normalize_full(apply_replacement(q, demos.theta_plus()))
        value = demos.church_value(counted)
        print(f"trail: {print_trail(q)}")
        print(f"contractions: {value}")
        print(f"leaf count: {demos.count_contractions(q)}")
        return EXIT_OK if value == demos.count_contractions(q) else EXIT_FAIL
    if cmd == "check":
        spec = GenSpec(seed=args.seed, size=args.size, flags=PROPERTIES[args.property].flags,
                       closed=PROPERTIES[args.property].closed)
        report = check_property(args.property, spec, args.count, exhaustive=False if args.random else None)
        print(json.dumps(report.summary()) if args.json else report.render())
        return EXIT_OK if report.ok else EXIT_FAIL
    if cmd == "demo":
        for line in demos.render(args.name):
            print(line)
        return EXIT_OK
    raise AssertionError(cmd)


if __name__ == "__main__":
    sys.exit(main())
