"""Command-line interface: ``lace <command> [options]``.

Exit codes: 0 answered (or true), 1 answered false, 2 usage or input error,
3 search budget exceeded, 4 no solution exists (merge/ask).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from . import asp, engine
from .engine import DEFAULT_BUDGET, BudgetExceeded, NoSolution, SearchStats
from .globalize import GlobalizeError, globalize_database, globalize_spec
from .model import Cell, Constant, DomainError, Kind
from .query import QueryError, variable_kinds
from .syntax import (
    ParseError,
    Workspace,
    load_sources,
    parse_query,
    parse_solution,
    render_solution,
    render_workspace,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET, EXIT_NO_SOLUTION = 0, 1, 2, 3, 4


class UsageError(Exception):
    def __init__(self, code: str, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.code, self.line, self.col = code, line, col

    def __str__(self) -> str:
        return f"{self.code}:{self.line}:{self.col}:{self.args[0]}"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("E500", message)


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--json", action="store_true", default=d(False), help="print a JSON run report")
    parser.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), metavar="N", help="cap on explored states")
    parser.add_argument("--seed", type=int, default=d(None), metavar="N", help="reserved; has no effect")
    for name, what in (("schema", "relation"), ("data", "fact"), ("sim", "similarity"), ("spec", "rule")):
        parser.add_argument(
            f"--{name}", action="append", default=d([]), metavar="FILE", help=f"extra file of {what} lines"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="lace", description="Collective entity resolution with global and local merges.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def command(name, help):
        p = sub.add_parser(name, help=help)
        _global_options(p, suppress=True)
        p.add_argument("workspace", nargs="?", help="workspace file (.lace)")
        return p

    p = command("check", "is the solution file a solution?")
    p.add_argument("solution", help="solution file (.sol)")
    p = command("maxcheck", "is the solution file a maximal solution?")
    p.add_argument("solution", help="solution file (.sol)")
    command("exists", "does any solution exist?")
    p = command("solve", "enumerate solutions")
    p.add_argument("--max", action="store_true", help="only maximal solutions")
    p.add_argument("--limit", type=int, metavar="N", help="print at most N solutions")
    p = command("merge", "is a merge possible/certain?")
    p.add_argument("--pair", required=True, help='"obj a b" or "val t1.2 t2.2"')
    p.add_argument("--mode", choices=("possible", "certain"), required=True)
    p = command("ask", "is a tuple a possible/certain answer?")
    p.add_argument("--query", required=True, metavar="FILE", help="query file (.q)")
    p.add_argument("--tuple", default="", metavar="CSV", help="comma-separated answer constants")
    p.add_argument("--mode", choices=("possible", "certain"), required=True)
    command("globalize", "print the equivalent specification without object rules")
    p = command("emit-asp", "print the logic program for the solutions")
    p.add_argument("--out", metavar="FILE", help="write the program here instead of stdout")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError("E501", f"cannot read {path}: {exc.strerror}") from None


def _load(args) -> Workspace:
    if args.workspace is None and not (args.schema or args.data or args.spec):
        raise UsageError("E500", "no workspace given")
    return load_sources(
        [_read(args.workspace)] if args.workspace else [],
        [_read(p) for p in args.schema],
        [_read(p) for p in args.data],
        [_read(p) for p in args.sim],
        [_read(p) for p in args.spec],
    )


def parse_pair(text: str):
    parts = text.split()
    if len(parts) != 3 or parts[0] not in ("obj", "val"):
        raise UsageError("E502", f'bad pair "{text}"; expected "obj a b" or "val t.i t.j"')
    if parts[0] == "obj":
        pair = (Constant(Kind.OBJ, parts[1]), Constant(Kind.OBJ, parts[2]))
    else:
        cells = []
        for p in parts[1:]:
            t, _, i = p.rpartition(".")
            if not t or not i.isdigit():
                raise UsageError("E502", f'bad cell "{p}"; expected tid.position')
            cells.append(Cell(Constant(Kind.TID, t), int(i)))
        pair = tuple(cells)
    return pair


def parse_tuple(text: str, kinds: Sequence[Kind]) -> List[Constant]:
    fields = next(csv.reader([text], skipinitialspace=True)) if text.strip() else []
    if len(fields) != len(kinds):
        raise UsageError("E503", f"query has arity {len(kinds)}, tuple has {len(fields)} constants")
    return [Constant(k, f) for k, f in zip(kinds, fields)]


def _solution_json(state) -> dict:
    return {
        "eqo": [[str(x) for x in cls] for cls in state.e.nontrivial_classes()],
        "eqv": [[str(x) for x in cls] for cls in state.v.nontrivial_classes()],
    }


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _run(args, stats: SearchStats):
    """Returns (exit code, JSON result, text output)."""
    ws = _load(args)
    db, spec, budget = ws.db, ws.spec, args.budget
    cmd = args.command

    if cmd in ("check", "maxcheck"):
        e, v = parse_solution(_read(args.solution), db)
        if cmd == "check":
            ok = engine.rec_check(db, spec, e, v)
            return (EXIT_OK if ok else EXIT_NO), {"solution": ok}, f"solution: {_yes(ok)}\n"
        ok = engine.max_rec_check(db, spec, e, v, budget, stats)
        return (EXIT_OK if ok else EXIT_NO), {"maximal": ok}, f"maximal solution: {_yes(ok)}\n"

    if cmd == "exists":
        ok = engine.existence(db, spec, budget, stats)
        return (EXIT_OK if ok else EXIT_NO), {"exists": ok}, f"exists: {_yes(ok)}\n"

    if cmd == "solve":
        if args.limit is not None and args.limit < 0:
            raise UsageError("E500", "--limit must be non-negative")
        sols = (engine.enumerate_max_solutions if args.max else engine.enumerate_solutions)(db, spec, budget, stats)
        shown = sols if args.limit is None else sols[: args.limit]
        what = "maximal solutions" if args.max else "solutions"
        lines = [f"# {len(sols)} {what}"]
        for n, s in enumerate(shown, 1):
            lines.append(f"# solution {n}")
            body = render_solution(s.e, s.v)
            if body:
                lines.append(body.rstrip("\n"))
        result = {
            "maximal": args.max,
            "count": len(sols),
            "truncated": len(shown) < len(sols),
            "solutions": [_solution_json(s) for s in shown],
        }
        return EXIT_OK, result, "\n".join(lines) + "\n"

    if cmd == "merge":
        pair = parse_pair(args.pair)
        fn = engine.poss_merge if args.mode == "possible" else engine.cert_merge
        ok = fn(db, spec, pair, budget, stats)
        result = {"mode": args.mode, "pair": args.pair, "answer": ok}
        return (EXIT_OK if ok else EXIT_NO), result, f"{args.mode} merge {args.pair}: {_yes(ok)}\n"

    if cmd == "ask":
        q = parse_query(_read(args.query), ws.schema)
        kinds = variable_kinds(q, ws.schema)
        values = parse_tuple(args.tuple, [kinds[x] for x in q.free])
        fn = engine.poss_ans if args.mode == "possible" else engine.cert_ans
        ok = fn(db, spec, q, values, budget, stats)
        shown = ", ".join(str(c) for c in values)
        result = {"mode": args.mode, "tuple": [c.lexeme for c in values], "answer": ok}
        return (EXIT_OK if ok else EXIT_NO), result, f"{args.mode} answer ({shown}): {_yes(ok)}\n"

    if cmd == "globalize":
        g = globalize_spec(ws.schema, spec)
        out = render_workspace(Workspace(g.schema, globalize_database(db), g.spec))
        result = {
            "workspace": out,
            "linking_rules": len(g.linking_rules),
            "selections": [
                {"rule": s.rule, "x": [s.x_atom, s.x_position], "y": [s.y_atom, s.y_position]} for s in g.selections
            ],
        }
        return EXIT_OK, result, out

    if cmd == "emit-asp":
        text = asp.emit_program(db, spec).text
        if args.out:
            try:
                Path(args.out).write_text(text, encoding="utf-8")
            except OSError as exc:
                raise UsageError("E501", f"cannot write {args.out}: {exc.strerror}") from None
            return EXIT_OK, {"out": args.out, "lines": text.count("\n")}, ""
        return EXIT_OK, {"program": text}, text

    raise UsageError("E500", f"unknown command {cmd}")  # pragma: no cover


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    stats = SearchStats()
    start = time.perf_counter()
    status, code, result, text = "ok", EXIT_OK, None, ""
    try:
        code, result, text = _run(args, stats)
    except (UsageError, ParseError) as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (QueryError, GlobalizeError) as exc:
        print(f"{exc.code}:0:0:{exc}", file=stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"E504:0:0:{exc}", file=stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        status, code = "exceeded", EXIT_BUDGET
        stats.explored = exc.explored
        if not args.json:
            print(f"budget exceeded after {exc.explored} states", file=stderr)
    except NoSolution:
        code = EXIT_NO_SOLUTION
        result = {"answer": None, "no_solution": True}
        text = "no solution exists\n"
    if args.json:
        report = {
            "command": args.command,
            "elapsed": round(time.perf_counter() - start, 6),
            "states_explored": stats.explored,
            "budget_status": status,
            "result": result,
        }
        stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
