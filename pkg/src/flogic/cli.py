"""Batch command line interface.

Subcommands: check, flat, analyze, graph, solve, trace, serve.  Exit
codes: 0 success, 1 failed check, 2 user error (bad input, unknown
names), 3 goal floundered with no answers.  Output is deterministic for
identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import analysis as an
from . import trace as tr
from .analysis import Graph, Message, default_registry
from .evaluator import EvalError, SolveConfig, solve
from .infer import TypeInferenceError
from .ir import IRError, ValidationError, serialize_ir
from .loaders import LANGUAGES, UnknownLanguageError, compile_goal, load_path
from .prolog import PrologError
from .surface import SurfaceError


class _UserError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


_LOAD_ERRORS = (SurfaceError, PrologError, IRError, TypeInferenceError,
                UnknownLanguageError, OSError)


def _load(path: str, lang: Optional[str]):
    try:
        return load_path(path, lang)
    except ValidationError as exc:
        lines = "\n".join(f"{v.decl}: [{v.rule}] {v.detail}"
                          for v in exc.violations)
        raise _UserError(f"invalid program:\n{lines}")
    except _LOAD_ERRORS as exc:
        raise _UserError(str(exc))


def _goal(program, text: str):
    try:
        return compile_goal(program, text)
    except (SurfaceError, EvalError) as exc:
        raise _UserError(f"bad goal: {exc}")


def _write(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_check(args) -> int:
    try:
        _load(args.file, args.lang)
    except _UserError as exc:
        print(f"check failed: {exc}")
        return 1
    print("ok")
    return 0


def _cmd_flat(args) -> int:
    program = _load(args.file, args.lang)
    _write(serialize_ir(program), args.output)
    return 0


def _cmd_analyze(args) -> int:
    program = _load(args.file, args.lang)
    registry = default_registry()
    try:
        if args.function is not None:
            analysis = registry.get(args.name)
            results = [(args.function, analysis(program, args.function))]
        else:
            results = an.analyse_program(registry, args.name, program)
    except (an.UnknownAnalysisError, an.UnknownFunctionError) as exc:
        raise _UserError(str(exc))
    for fn, result in results:
        if isinstance(result, Message):
            print(f"{fn}: {result.text}")
        else:
            assert isinstance(result, Graph)
            g = result.graph
            print(f"{fn}: dependency graph with {len(g.nodes)} nodes "
                  f"and {len(g.edges)} edges")
    return 0


def _cmd_graph(args) -> int:
    program = _load(args.file, args.lang)
    try:
        result = an.dep_graph(program, args.function)
    except an.UnknownFunctionError as exc:
        raise _UserError(str(exc))
    print(an.export_graph(result.graph, args.format), end="")
    return 0


def _cmd_solve(args) -> int:
    program = _load(args.file, args.lang)
    goal, hints = _goal(program, args.goal)
    limit = None
    if args.first:
        limit = 1
    elif args.limit is not None:
        limit = args.limit
    config = SolveConfig(strategy=args.strategy,
                         max_steps_per_branch=args.max_steps,
                         max_nodes=args.max_nodes,
                         max_answers=limit)
    result = solve(program, goal, config, hints)
    for answer in result.answers:
        line = answer.show_value()
        if answer.bindings:
            line += " {" + answer.show_bindings() + "}"
        print(line)
    if result.floundered:
        print("floundered")
    if result.exhausted:
        print("budget exhausted")
    if not result.answers and result.floundered:
        return 3
    return 0


def _cmd_trace(args) -> int:
    program = _load(args.file, args.lang)
    goal, hints = _goal(program, args.goal)
    try:
        session = tr.start(program, goal, hints)
    except EvalError as exc:
        raise _UserError(f"bad goal: {exc}")
    tr.run_to(session, ("steps", args.steps))
    _write(tr.export_trace(session), args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        raise _UserError(f"bad address {args.addr!r}; expected HOST:PORT")
    app = create_app(ui_dir=args.ui)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="flogic",
        description="Functional-logic program analysis and "
                    "debugging workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        return sp

    def add_file(sp):
        sp.add_argument("file", help="program file (.mcy, .pl or .json)")
        sp.add_argument("--lang", choices=LANGUAGES,
                        help="front end override (default: by extension)")

    sp = add("check", _cmd_check, "validate a program")
    add_file(sp)

    sp = add("flat", _cmd_flat, "compile to the serialized flat form")
    add_file(sp)
    sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = add("analyze", _cmd_analyze, "run a program analysis")
    add_file(sp)
    sp.add_argument("--name", required=True, help="analysis display name")
    sp.add_argument("--function", help="restrict to one function")

    sp = add("graph", _cmd_graph, "export a dependency graph")
    add_file(sp)
    sp.add_argument("--function", required=True)
    sp.add_argument("--format", choices=("dot", "json"), default="dot")

    sp = add("solve", _cmd_solve, "evaluate a goal and print answers")
    add_file(sp)
    sp.add_argument("--goal", required=True)
    sp.add_argument("--strategy", choices=("dfs", "bfs"), default="dfs")
    sp.add_argument("--limit", type=int)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true",
                       help="all answers (default)")
    group.add_argument("--first", action="store_true",
                       help="stop after the first answer")
    sp.add_argument("--max-steps", type=int, default=10000,
                    help="dfs step budget per branch")
    sp.add_argument("--max-nodes", type=int, default=100000,
                    help="bfs node budget")

    sp = add("trace", _cmd_trace, "export a trace of the first N steps")
    add_file(sp)
    sp.add_argument("--goal", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("-o", "--output", help="output file (default stdout)")

    sp = add("serve", _cmd_serve, "start the HTTP workbench service")
    sp.add_argument("--addr", default="127.0.0.1:8765")
    sp.add_argument("--ui", help="directory of static UI files to mount")

    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except _UserError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except json.JSONDecodeError as exc:
        print(f"bad JSON input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
