"""Command-line driver: ``rtr check|eval|prove FILE``."""

from __future__ import annotations

import argparse
import contextvars
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import TextIO

from rtr.checker import CheckError, Diagnostic, check, check_against
from rtr.core import IsType, OVar, Alias, and_, fresh_scope, peel
from rtr.eval import DEFAULT_FUEL, FuelExhausted, StuckError, evaluate
from rtr.pretty import show
from rtr.prover import HybridEnv, default_split_depth, proves
from rtr.reader import Annotation, Define, ExprForm, ParseError, ProveQuery, SourceProgram, line_col, parse

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


class InternalError(Exception):
    """A checked program misbehaved at run time."""


@dataclass
class Report:
    path: str
    text: str
    as_json: bool
    out: TextIO
    failed: bool = False
    lines: list[str] = field(default_factory=list)

    def _location(self, span) -> str:
        if not span:
            return self.path
        line, col = line_col(self.text, span[0])
        return f"{self.path}:{line}:{col}"

    def emit(self, kind: str, span, message: str, expected=None, actual=None, query=None) -> None:
        if self.as_json:
            record = {
                "kind": kind,
                "span": self._json_span(span),
                "expected": expected,
                "actual": actual,
                "query": query,
                "path": self.path,
                "message": message,
            }
            self.out.write(json.dumps(record, sort_keys=True) + "\n")
            return
        if kind in ("type", "value", "verdict"):
            self.out.write(message + "\n")
            return
        self.out.write(f"{self._location(span)}: error[{kind}]: {message}\n")
        for label, val in (("expected", expected), ("actual", actual), ("query", query)):
            if val is not None:
                self.out.write(f"  {label}: {val}\n")

    def _json_span(self, span):
        if not span:
            return None
        (l1, c1), (l2, c2) = line_col(self.text, span[0]), line_col(self.text, span[1])
        return {"start": span[0], "end": span[1], "line": l1, "col": c1, "end_line": l2, "end_col": c2}

    def diagnostic(self, d: Diagnostic) -> None:
        self.failed = True
        self.emit(d.kind, d.span, d.message, d.expected, d.actual, d.query)


def _check_program(prog: SourceProgram, report: Report, split_depth: int, run_queries: bool):
    """Check every form; returns the list of (name or None, expr) to evaluate."""
    env = HybridEnv.empty(split_depth)
    scope: set[str] = set()
    pending: dict[str, Annotation] = {}
    defined: set[str] = set()
    runnable = []
    for form in prog.forms:
        if isinstance(form, Annotation):
            if form.name in pending or form.name in defined:
                report.diagnostic(Diagnostic("duplicate-annotation", form.span,
                                             f"{form.name} is already annotated or defined"))
            pending[form.name] = form
            continue
        if isinstance(form, ProveQuery):
            if run_queries:
                _run_query(form, report, split_depth)
            continue
        try:
            if isinstance(form, Define):
                if form.name in defined:
                    raise CheckError(Diagnostic("duplicate-definition", form.span, f"{form.name} is defined twice"))
                ann = pending.pop(form.name, None)
                x = OVar(form.name)
                if ann is not None:
                    check_against(env, form.expr, ann.type, scope)
                    env = env.assume(IsType(x, ann.type))
                    report.emit("type", form.span, f"{form.name} : {show(ann.type)}")
                else:
                    r = check(env, form.expr, scope)
                    binders, res = peel(r)
                    for name, ty in binders:
                        env = env.assume(IsType(OVar(name), ty))
                        scope.add(name)
                    env = env.assume(and_(IsType(x, res.type), Alias(x, res.obj)))
                    report.emit("type", form.span, f"{form.name} : {show(res.type)}")
                defined.add(form.name)
                scope.add(form.name)
                runnable.append((form.name, form.expr))
            elif isinstance(form, ExprForm):
                r = check(env, form.expr, scope)
                report.emit("type", form.span, show(r))
                runnable.append((None, form.expr))
        except CheckError as err:
            report.diagnostic(err.diagnostic)
    for ann in pending.values():
        report.diagnostic(Diagnostic("missing-definition", ann.span, f"{ann.name} is annotated but never defined"))
    return runnable


def _run_query(q: ProveQuery, report: Report, split_depth: int) -> None:
    env = HybridEnv.of(q.assumptions, split_depth)
    ok = proves(env, q.goal)
    if ok:
        report.emit("verdict", q.span, f"valid: {show(q.goal)}")
    else:
        report.diagnostic(Diagnostic("unproved", q.span, f"cannot prove {show(q.goal)}",
                                     expected=show(q.goal), query=_query_text(q)))


def _query_text(q: ProveQuery) -> str:
    return " ".join(show(a) for a in q.assumptions) + " |- " + show(q.goal)


def _run(args: argparse.Namespace, out: TextIO) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        print(f"{args.file}: {err.strerror}", file=sys.stderr)
        return EXIT_FAIL
    report = Report(args.file, text, args.json, out)
    try:
        prog = parse(text, args.file)
    except ParseError as err:
        report.emit("parse-error", (err.offset, err.offset), err.message)
        return EXIT_PARSE
    split_depth = args.split_depth if args.split_depth is not None else default_split_depth()
    with fresh_scope():
        if args.command == "prove":
            for form in prog.forms:
                if isinstance(form, ProveQuery):
                    _run_query(form, report, split_depth)
            return EXIT_FAIL if report.failed else EXIT_OK
        runnable = _check_program(prog, report, split_depth, run_queries=args.command == "check")
        if report.failed or args.command == "check":
            return EXIT_FAIL if report.failed else EXIT_OK
        rho = {}
        for name, expr in runnable:
            try:
                v = evaluate(rho, expr, args.fuel)
            except FuelExhausted:
                report.diagnostic(Diagnostic("fuel-exhausted", expr.span, f"evaluation ran out of fuel ({args.fuel} steps)"))
                return EXIT_FAIL
            except StuckError as err:
                raise InternalError(f"checked program got stuck: {err.reason}") from err
            if name is None:
                report.emit("value", expr.span, show(v))
            else:
                rho[name] = v
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rtr", description="Check, run and query programs with refinement types.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("check", "type check every form"),
        ("eval", "type check, then evaluate the bare expressions"),
        ("prove", "decide the prove queries"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--json", action="store_true", help="one JSON object per output line")
        p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="evaluation step budget")
        p.add_argument("--split-depth", type=int, default=None, help="bound on disjunction case splits")
        p.add_argument("--trace", action="store_true", help="log typing rules and entailment queries to stderr")
    return ap


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    log = logging.getLogger("rtr")
    handler = None
    if args.trace:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        log.addHandler(handler)
        log.setLevel(logging.DEBUG)
    try:
        # a clean context, so fresh names are numbered from zero on every run
        return contextvars.Context().run(_run, args, out)
    except InternalError as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except RecursionError:
        print("internal error: recursion limit exceeded", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # noqa: BLE001 - any escape is an invariant violation
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    finally:
        if handler is not None:
            log.removeHandler(handler)
            log.setLevel(logging.NOTSET)


run = main

if __name__ == "__main__":
    sys.exit(main())
