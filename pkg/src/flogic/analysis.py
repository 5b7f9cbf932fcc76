"""Pluggable, memoized program analyses.

An analysis is a callable ``(Program, function_name) -> AnalysisResult``
registered under a display name.  Results for a whole module materialize
per function on demand: the cache is keyed by a content hash of the
serialized program plus the analysis name, and a given (version, analysis,
function) triple computes at most once, even under concurrent requests.

The built-in registry covers the classic workbench set: the function's
type, overlap of defining rules, a sufficient completeness criterion,
direct/indirect dependencies, callers, dead code and the dependency graph.
Dependency-style results count builtins such as ``=:=`` because they occur
as ordinary call heads in the flat form; constructors never count.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

from .ir import (
    Case, Expr, External, Free, FunCall, LitPat, Or, PartCall, Program,
    called_functions, or_in_expr, serialize_ir, show_type, subexprs,
)
from .infer import infer_types
from . import prelude


class AnalysisError(Exception):
    pass


class UnknownAnalysisError(AnalysisError):
    pass


class UnknownFunctionError(AnalysisError):
    pass


class DuplicateAnalysisError(AnalysisError):
    pass


# ---------------------------------------------------------------------------
# Results


class AnalysisResult:
    __slots__ = ()


@dataclass(frozen=True)
class Message(AnalysisResult):
    text: str


@dataclass(frozen=True)
class DepGraph:
    """Call graph fragment rooted at one function.

    Every node must be reachable from the root and every edge endpoint
    must be a node; duplicate edges are rejected.
    """

    root: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        nodes = set(self.nodes)
        if self.root not in nodes:
            raise ValueError(f"root {self.root} is not a node")
        if len(self.edges) != len(set(self.edges)):
            raise ValueError("duplicate edges")
        adj: dict[str, list[str]] = {}
        for a, b in self.edges:
            if a not in nodes or b not in nodes:
                raise ValueError(f"edge ({a}, {b}) leaves the node set")
            adj.setdefault(a, []).append(b)
        seen = {self.root}
        frontier = [self.root]
        while frontier:
            for nxt in adj.get(frontier.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        unreachable = nodes - seen
        if unreachable:
            raise ValueError(f"unreachable nodes: {sorted(unreachable)}")


@dataclass(frozen=True)
class Graph(AnalysisResult):
    graph: DepGraph


Analysis = Callable[[Program, str], AnalysisResult]


# ---------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class AnalysisRegistry:
    entries: tuple[tuple[str, Analysis], ...] = ()

    def names(self) -> list[str]:
        return [name for name, _ in self.entries]

    def get(self, name: str) -> Analysis:
        for entry_name, fn in self.entries:
            if entry_name == name:
                return fn
        raise UnknownAnalysisError(f"no analysis named {name!r}")


def register(registry: AnalysisRegistry, name: str,
             analysis: Analysis) -> AnalysisRegistry:
    if name in registry.names():
        raise DuplicateAnalysisError(f"analysis {name!r} already registered")
    return AnalysisRegistry(registry.entries + ((name, analysis),))


def list_analyses(registry: AnalysisRegistry) -> list[str]:
    return registry.names()


def analyse_program(registry: AnalysisRegistry, name: str,
                    program: Program) -> list[tuple[str, AnalysisResult]]:
    """One (function, result) pair per module function, in source order.

    Builtins stay out of the listing but remain addressable through
    analyze/apply on a single function name.
    """
    fn = registry.get(name)
    return [(f.name, fn(program, f.name)) for f in program.functions]


def function_universe(program: Program) -> list[str]:
    """Module functions in source order, then the builtins."""
    names = [f.name for f in program.functions]
    names.extend(b for b in prelude.BUILTINS if b not in set(names))
    return names


def _decl(program: Program, fname: str):
    f = program.function(fname)
    if f is None:
        f = prelude.BUILTINS.get(fname)
    if f is None:
        raise UnknownFunctionError(f"no function named {fname!r}")
    return f


# ---------------------------------------------------------------------------
# The builtin analyses


def get_type(program: Program, fname: str) -> AnalysisResult:
    f = _decl(program, fname)
    sig = f.signature
    if sig is None:
        sig = infer_types(program).function(fname).signature
    return Message(show_type(sig))


def overlapping(program: Program, fname: str) -> AnalysisResult:
    f = _decl(program, fname)
    if isinstance(f.rule, External):
        return Message("not overlapping")
    return Message("overlapping" if or_in_expr(f.rule.body)
                   else "not overlapping")


def completeness(program: Program, fname: str) -> AnalysisResult:
    f = _decl(program, fname)
    if isinstance(f.rule, External):
        return Message("complete")
    ctors_of = {}
    for t in program.types:
        for c in t.constructors:
            ctors_of[c.name] = frozenset(x.name for x in t.constructors)

    def ok(e: Expr) -> bool:
        if isinstance(e, FunCall):
            if e.name == "failed":
                return False
            return all(ok(a) for a in e.args)
        if isinstance(e, Case):
            if any(isinstance(b.pattern, LitPat) for b in e.branches):
                return False
            names = {b.pattern.name for b in e.branches}
            want = ctors_of.get(next(iter(names)))
            if want is None or names != want:
                return False
            return ok(e.scrutinee) and all(ok(b.body) for b in e.branches)
        if isinstance(e, Or):
            return ok(e.left) and ok(e.right)
        if isinstance(e, Free):
            return ok(e.body)
        if isinstance(e, PartCall):
            return all(ok(a) for a in e.args)
        if hasattr(e, "args"):
            return all(ok(a) for a in e.args)
        if hasattr(e, "fn"):
            return ok(e.fn) and ok(e.arg)
        return True

    return Message("complete" if ok(f.rule.body) else "might be incomplete")


def _direct(program: Program, fname: str) -> set[str]:
    f = _decl(program, fname)
    if isinstance(f.rule, External):
        return set()
    return called_functions(f.rule.body)


def _listing(names) -> Message:
    return Message(", ".join(sorted(names)))


def direct_deps(program: Program, fname: str) -> AnalysisResult:
    return _listing(_direct(program, fname))


def _closure(program: Program, fname: str) -> set[str]:
    """Transitive call closure; fname itself only if self-reachable."""
    out: set[str] = set()
    frontier = list(_direct(program, fname))
    while frontier:
        g = frontier.pop()
        if g in out:
            continue
        out.add(g)
        frontier.extend(_direct(program, g))
    return out


def indirect_deps(program: Program, fname: str) -> AnalysisResult:
    return _listing(_closure(program, fname))


def called_by(program: Program, fname: str) -> AnalysisResult:
    _decl(program, fname)
    callers = [f.name for f in program.functions
               if fname in _direct(program, f.name)]
    return _listing(callers)


def dead_code(program: Program, fname: str) -> AnalysisResult:
    live = _closure(program, fname) | {fname}
    return _listing(f.name for f in program.functions if f.name not in live)


def dep_graph(program: Program, fname: str) -> AnalysisResult:
    nodes = {fname} | _closure(program, fname)
    edges = []
    for g in sorted(nodes):
        for h in sorted(_direct(program, g) & nodes):
            edges.append((g, h))
    ordered = [fname] + sorted(nodes - {fname})
    return Graph(DepGraph(fname, tuple(ordered), tuple(sorted(edges))))


def export_graph(g: DepGraph, format: str) -> str:
    if format == "json":
        import json

        return json.dumps({"root": g.root, "nodes": list(g.nodes),
                           "edges": [list(e) for e in g.edges]}, indent=1)
    if format != "dot":
        raise ValueError(f"unknown graph format {format!r}")
    lines = ["digraph {"]
    for n in g.nodes:
        style = ' [shape=box, style=bold]' if n == g.root else ""
        lines.append(f'  "{n}"{style};')
    for a, b in g.edges:
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def default_registry() -> AnalysisRegistry:
    reg = AnalysisRegistry()
    for name, fn in (
        ("Get Type", get_type),
        ("Overlapping Rules", overlapping),
        ("Completeness", completeness),
        ("DDependency", direct_deps),
        ("IDependency", indirect_deps),
        ("Called By", called_by),
        ("Dead Code", dead_code),
        ("DGraph", dep_graph),
    ):
        reg = register(reg, name, fn)
    return reg


# ---------------------------------------------------------------------------
# Memoization


def program_version(program: Program) -> str:
    return hashlib.sha256(serialize_ir(program).encode()).hexdigest()


class AnalysisCache:
    """Single-flight memo table over (version, analysis, function)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._done: dict[tuple[str, str, str], AnalysisResult] = {}
        self._inflight: dict[tuple[str, str, str], threading.Event] = {}

    def lookup(self, version: str, analysis: str, function: str,
               compute: Callable[[], AnalysisResult]) -> AnalysisResult:
        key = (version, analysis, function)
        while True:
            with self._lock:
                if key in self._done:
                    return self._done[key]
                event = self._inflight.get(key)
                if event is None:
                    event = threading.Event()
                    self._inflight[key] = event
                    owner = True
                else:
                    owner = False
            if not owner:
                event.wait()
                continue
            try:
                result = compute()
            except BaseException:
                with self._lock:
                    del self._inflight[key]
                event.set()
                raise
            with self._lock:
                self._done[key] = result
                del self._inflight[key]
            event.set()
            return result


def analyze(cache: AnalysisCache, registry: AnalysisRegistry,
            program: Program, analysis_name: str, function_name: str,
            version: Optional[str] = None) -> AnalysisResult:
    """Demand-driven, memoized analysis of one function."""
    fn = registry.get(analysis_name)
    _decl(program, function_name)  # unknown-function check up front
    if version is None:
        version = program_version(program)
    return cache.lookup(version, analysis_name, function_name,
                        lambda: fn(program, function_name))
