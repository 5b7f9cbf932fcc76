"""Reversible, breakpointed navigation over evaluator steps.

A trace session is a lazily grown tree of machine states.  Children of a
node are exactly the don't-know alternatives of one evaluator step and
are computed at most once, then cached, so going back and forward again
is free and bit-exact.  Rendering flattens a state's heap into an
expression tree that duplicates shared subtrees but tags every tree
element with its heap node id; the pending redex and the variables the
next step would bind are part of the rendering so a client can highlight
them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from . import evaluator as ev
from .ir import ConsPat, Expr, LitPat, Program, show_term


class TraceError(Exception):
    pass


class TerminalNodeError(TraceError):
    pass


class AlternativeRangeError(TraceError):
    pass


class AtRootError(TraceError):
    pass


class TraceFormatError(TraceError):
    pass


_MAX_RENDER_DEPTH = 100


@dataclass
class TraceNode:
    node_id: int
    state: ev.MachineState
    info: Optional[ev.StepInfo]
    parent: Optional["TraceNode"]
    alt_index: int
    _children: Optional[list["TraceNode"]] = None
    _status: Optional[ev.Status] = None
    _pending: Union[ev.Pending, None, bool] = False  # False = not computed

    def path(self) -> tuple[int, ...]:
        out = []
        node = self
        while node.parent is not None:
            out.append(node.alt_index)
            node = node.parent
        return tuple(reversed(out))


@dataclass
class TraceSession:
    program: Program
    root: TraceNode
    cursor: TraceNode
    breakpoints: set[str] = field(default_factory=set)
    history: list[tuple[int, ...]] = field(default_factory=list)
    notes: list[dict] = field(default_factory=list)
    step_budget: int = 10000
    _next_id: int = 1


def start(program: Program, goal: Expr,
          hints: Optional[dict[int, str]] = None,
          step_budget: int = 10000) -> TraceSession:
    state = ev.inject(program, goal, hints)
    root = TraceNode(0, state, None, None, 0)
    session = TraceSession(program, root, root, step_budget=step_budget)
    session.history.append(())
    return session


def _status(session: TraceSession, node: TraceNode) -> ev.Status:
    if node._status is None:
        node._status = ev.classify(session.program, node.state)
    return node._status


def _pending(session: TraceSession, node: TraceNode) -> Optional[ev.Pending]:
    if node._pending is False:
        node._pending = ev.pending_step(session.program, node.state)
    return node._pending


def children(session: TraceSession,
             node: Optional[TraceNode] = None) -> list[TraceNode]:
    """Alternatives of the node's next step; computed once, then cached."""
    node = node or session.cursor
    if node._children is None:
        if _status(session, node).kind != "running":
            node._children = []
        else:
            kids = []
            for i, (state, info) in enumerate(ev.step(session.program,
                                                      node.state)):
                kids.append(TraceNode(session._next_id, state, info, node, i))
                session._next_id += 1
            node._children = kids
    return node._children


def forward(session: TraceSession, alternative_index: int) -> dict:
    node = session.cursor
    if _status(session, node).kind != "running":
        raise TerminalNodeError("cannot step a terminal state")
    kids = children(session, node)
    if not 0 <= alternative_index < len(kids):
        raise AlternativeRangeError(
            f"alternative {alternative_index} out of range "
            f"(node has {len(kids)})")
    session.cursor = kids[alternative_index]
    session.history.append(session.cursor.path())
    return render(session)


def backward(session: TraceSession) -> dict:
    if session.cursor.parent is None:
        raise AtRootError("already at the root of the trace")
    session.cursor = session.cursor.parent
    session.history.append(session.cursor.path())
    return render(session)


def set_breakpoint(session: TraceSession, function_name: str):
    session.breakpoints.add(function_name)


def clear_breakpoint(session: TraceSession, function_name: str):
    session.breakpoints.discard(function_name)


def _at_breakpoint(session: TraceSession, node: TraceNode) -> bool:
    pend = _pending(session, node)
    if pend is None:
        return False
    _, redex = ev.deref(node.state.heap, pend.redex)
    return isinstance(redex, ev.NFun) and redex.name in session.breakpoints


def _advance(session: TraceSession) -> bool:
    """Take alternative 0, noting skipped branch points; False at terminal."""
    node = session.cursor
    if _status(session, node).kind != "running":
        return False
    kids = children(session, node)
    if len(kids) > 1:
        session.notes.append({"node": node.node_id,
                              "alternatives": len(kids), "took": 0})
    session.cursor = kids[0]
    session.history.append(session.cursor.path())
    return True


def run_to(session: TraceSession, policy) -> dict:
    """Follow alternative 0 until the policy fires.

    policy: "terminal", "breakpoint", or ("steps", n).  Breakpoints are
    checked before stepping, so a cursor already at a breakpoint stays
    put.  A step budget bounds every call; hitting it stops quietly.
    """
    if isinstance(policy, (tuple, list)) and policy and policy[0] == "steps":
        for _ in range(int(policy[1])):
            if not _advance(session):
                break
        return render(session)
    if policy == "terminal":
        for _ in range(session.step_budget):
            if not _advance(session):
                break
        return render(session)
    if policy == "breakpoint":
        for _ in range(session.step_budget):
            if _at_breakpoint(session, session.cursor):
                break
            if not _advance(session):
                break
        return render(session)
    raise TraceError(f"unknown run_to policy {policy!r}")


# ---------------------------------------------------------------------------
# Rendering


def _pattern_label(pattern, patvars, heap) -> str:
    if isinstance(pattern, LitPat):
        return str(pattern.value)
    labels = []
    for pv in patvars:
        vid, node = ev.deref(heap, pv)
        labels.append(node.hint if isinstance(node, ev.NVar) and node.hint
                      else f"_{vid}")
    assert isinstance(pattern, ConsPat)
    if pattern.name == ":" and len(labels) == 2:
        return f"{labels[0]}:{labels[1]}"
    if not labels:
        return pattern.name
    return pattern.name + " " + " ".join(labels)


def _render_tree(heap, nid: int, depth: int) -> dict:
    nid, node = ev.deref(heap, nid)
    if depth > _MAX_RENDER_DEPTH:
        return {"id": nid, "kind": "elided", "label": "...", "children": []}
    kids: list[dict] = []
    if isinstance(node, ev.NVar):
        label = node.hint or f"_{nid}"
        return {"id": nid, "kind": "var", "label": label, "children": []}
    if isinstance(node, ev.NLit):
        return {"id": nid, "kind": "lit", "label": str(node.value),
                "children": []}
    if isinstance(node, ev.NStruct):
        kids = [_render_tree(heap, a, depth + 1) for a in node.args]
        return {"id": nid, "kind": "cons", "label": node.name,
                "children": kids}
    if isinstance(node, ev.NFun):
        kids = [_render_tree(heap, a, depth + 1) for a in node.args]
        return {"id": nid, "kind": "fun", "label": node.name,
                "children": kids}
    if isinstance(node, ev.NPart):
        kids = [_render_tree(heap, a, depth + 1) for a in node.args]
        return {"id": nid, "kind": "part", "label": node.name,
                "missing": node.missing, "children": kids}
    if isinstance(node, ev.NApply):
        kids = [_render_tree(heap, node.fn, depth + 1),
                _render_tree(heap, node.arg, depth + 1)]
        return {"id": nid, "kind": "apply", "label": "@", "children": kids}
    if isinstance(node, ev.NOr):
        kids = [_render_tree(heap, node.left, depth + 1),
                _render_tree(heap, node.right, depth + 1)]
        return {"id": nid, "kind": "or", "label": "?", "children": kids}
    if isinstance(node, ev.NConj):
        kids = [_render_tree(heap, p, depth + 1) for p in node.parts]
        return {"id": nid, "kind": "conj", "label": "&", "children": kids}
    assert isinstance(node, ev.NCase)
    kids = [_render_tree(heap, node.scrut, depth + 1)]
    patterns = []
    for br in node.branches:
        patterns.append(_pattern_label(br.pattern, br.patvars, heap))
        kids.append(_render_tree(heap, br.body, depth + 1))
    label = "fcase" if node.kind == "flex" else "case"
    return {"id": nid, "kind": "case", "label": label,
            "patterns": patterns, "children": kids}


def _shared_ids(tree: dict) -> list[int]:
    counts: dict[int, int] = {}

    def walk(t: dict):
        counts[t["id"]] = counts.get(t["id"], 0) + 1
        for c in t["children"]:
            walk(c)

    walk(tree)
    return sorted(i for i, n in counts.items() if n > 1)


def render_state(program: Program, state: ev.MachineState,
                 pending: Optional[ev.Pending],
                 status: Optional[ev.Status] = None) -> dict:
    """Serialize one machine state for a client.

    The tree view duplicates shared subtrees; equal ids mark the sharing.
    The pending redex id and the ids of variables the next step would
    bind always appear in the tree.
    """
    status = status or ev.classify(program, state)
    heap = state.heap
    root_id, _ = ev.deref(heap, state.root)
    tree = _render_tree(heap, state.root, 0)
    names = ev.var_names(heap, state)
    tasks = []
    for t in state.tasks:
        goal_id, _ = ev.deref(heap, t.goal)
        entry = {"id": t.id, "status": t.status, "goal": goal_id}
        if t.wait_var is not None:
            entry["wait"] = ev.deref(heap, t.wait_var)[0]
        tasks.append(entry)
    out = {
        "step": state.step_count,
        "terminal": status.kind,
        "root": root_id,
        "tree": tree,
        "shared": _shared_ids(tree),
        "redex": pending.redex if pending else None,
        "kind": pending.kind if pending else None,
        "bound": list(pending.would_bind) if pending else [],
        "tasks": tasks,
        "vars": [[name, ev.deref(heap, nid)[0]]
                 for name, nid in state.goal_vars],
        "answer": None,
        "bindings": None,
        "reason": None,
    }
    if status.kind == "success":
        out["answer"] = show_term(status.value, names)
        out["bindings"] = [[name, show_term(ev.readback(heap, nid), names)]
                           for name, nid in state.goal_vars]
    elif status.kind == "failure":
        out["reason"] = status.reason
    return out


def render(session: TraceSession,
           node: Optional[TraceNode] = None) -> dict:
    node = node or session.cursor
    return render_state(session.program, node.state,
                        _pending(session, node), _status(session, node))


# ---------------------------------------------------------------------------
# Wire format


def _node_record(session: TraceSession, node: TraceNode) -> dict:
    info = None
    if node.info is not None:
        info = {"redex": node.info.redex, "kind": node.info.kind,
                "bound": [list(b) for b in node.info.bound_vars]}
    return {
        "id": node.node_id,
        "state": render(session, node),
        "stepinfo": info,
        "children": [c.node_id for c in (node._children or [])],
        "terminal": _status(session, node).kind,
    }


def export_data(session: TraceSession) -> dict:
    """The full visited tree in the wire format."""
    nodes = []

    def walk(node: TraceNode):
        nodes.append(_node_record(session, node))
        for c in node._children or []:
            walk(c)

    walk(session.root)
    nodes.sort(key=lambda n: n["id"])
    return {"nodes": nodes, "root": session.root.node_id,
            "cursor": session.cursor.node_id}


def export_trace(session: TraceSession) -> str:
    return json.dumps(export_data(session), indent=1)


@dataclass(frozen=True)
class ExportedTrace:
    data: dict

    @property
    def root(self) -> int:
        return self.data["root"]

    @property
    def cursor(self) -> int:
        return self.data["cursor"]

    def node(self, nid: int) -> dict:
        for n in self.data["nodes"]:
            if n["id"] == nid:
                return n
        raise TraceFormatError(f"no node {nid}")


def import_trace(text: str) -> ExportedTrace:
    """Parse and validate an exported trace."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("nodes"), list):
        raise TraceFormatError("expected an object with a node list")
    ids = set()
    for n in data["nodes"]:
        if not isinstance(n, dict) or not isinstance(n.get("id"), int):
            raise TraceFormatError("every node needs an integer id")
        if n["id"] in ids:
            raise TraceFormatError(f"duplicate node id {n['id']}")
        ids.add(n["id"])
        for key in ("state", "children", "terminal"):
            if key not in n:
                raise TraceFormatError(f"node {n['id']} is missing {key!r}")
        info = n.get("stepinfo")
        if info is not None and not (
                isinstance(info, dict) and "redex" in info
                and "kind" in info and "bound" in info):
            raise TraceFormatError(f"node {n['id']} has a malformed stepinfo")
    for n in data["nodes"]:
        for c in n["children"]:
            if c not in ids:
                raise TraceFormatError(f"child {c} of {n['id']} is missing")
    for key in ("root", "cursor"):
        if data.get(key) not in ids:
            raise TraceFormatError(f"{key} does not name a node")
    return ExportedTrace(data)


def export_imported(trace: ExportedTrace) -> str:
    return json.dumps(trace.data, indent=1)
