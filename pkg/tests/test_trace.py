"""Trace sessions: reversible navigation, breakpoints, wire format."""

import json
import random

import pytest

from flogic import evaluator as ev
from flogic import trace as tr
from flogic.loaders import load_source
from flogic.surface import compile_goal

COIN_SRC = """
coin :: Int
coin eval flex
coin = 0
coin = 1
"""


def start(program, text, **kw):
    expr, hints = compile_goal(program, text)
    return tr.start(program, expr, hints, **kw)


def tree_ids(tree):
    yield tree["id"]
    for child in tree["children"]:
        yield from tree_ids(child)


# --- navigation ---------------------------------------------------------------


def test_forward_then_backward_restores_the_same_state(list_program):
    s = start(list_program, "last [1,2,3]")
    before = json.dumps(tr.render(s), sort_keys=True)
    root = s.cursor
    tr.forward(s, 0)
    assert s.cursor is not root
    tr.backward(s)
    assert s.cursor is root
    assert json.dumps(tr.render(s), sort_keys=True) == before


def test_random_walk_rewinds_bit_exact(list_program):
    for seed in range(10):
        rng = random.Random(seed)
        s = start(list_program, "conc ys [x] =:= [1,2,3] where ys, x free")
        snapshots = [json.dumps(tr.render(s), sort_keys=True)]
        for _ in range(50):
            kids = tr.children(s)
            if not kids:
                break
            tr.forward(s, rng.randrange(len(kids)))
            snapshots.append(json.dumps(tr.render(s), sort_keys=True))
        while s.cursor.parent is not None:
            snapshots.pop()
            tr.backward(s)
            assert json.dumps(tr.render(s), sort_keys=True) == snapshots[-1]
        assert s.cursor is s.root


def test_each_state_is_computed_at_most_once(list_program, monkeypatch):
    calls = []
    real = ev.step

    def counting(program, state):
        calls.append(state)
        return real(program, state)

    monkeypatch.setattr(ev, "step", counting)
    s = start(list_program, "last [1,2,3]")
    for _ in range(5):
        tr.forward(s, 0)
    for _ in range(5):
        tr.backward(s)
    for _ in range(5):
        tr.forward(s, 0)
    assert len(calls) == 5


def test_forward_reuses_cached_children(list_program):
    s = start(list_program, "last [1,2]")
    tr.forward(s, 0)
    first = s.cursor
    tr.backward(s)
    tr.forward(s, 0)
    assert s.cursor is first


def test_children_match_evaluator_alternatives():
    p = load_source(COIN_SRC, lang="mcy")
    s = start(p, "coin + coin")
    while True:
        kids = tr.children(s)
        if len(kids) > 1:
            break
        tr.forward(s, 0)
    alts = ev.step(p, s.cursor.state)
    assert len(kids) == len(alts)
    for node, (state, info) in zip(kids, alts):
        assert node.state == state
        assert node.info == info


def test_history_records_cursor_paths(list_program):
    s = start(list_program, "last [1,2]")
    tr.forward(s, 0)
    tr.forward(s, 0)
    tr.backward(s)
    assert s.history == [(), (0,), (0, 0), (0,)]


# --- errors ---------------------------------------------------------------------


def test_stepping_past_the_end_is_an_error(list_program):
    s = start(list_program, "[1,2]")
    with pytest.raises(tr.TerminalNodeError,
                       match="cannot step a terminal state"):
        tr.forward(s, 0)


def test_alternative_out_of_range(list_program):
    s = start(list_program, "last [1,2]")
    with pytest.raises(tr.AlternativeRangeError,
                       match=r"alternative 3 out of range \(node has 1\)"):
        tr.forward(s, 3)


def test_backward_at_root(list_program):
    s = start(list_program, "last [1,2]")
    with pytest.raises(tr.AtRootError,
                       match="already at the root of the trace"):
        tr.backward(s)


# --- run_to ----------------------------------------------------------------------


def test_run_to_terminal(list_program):
    s = start(list_program, "conc [1] [2,3]")
    out = tr.run_to(s, "terminal")
    assert out["terminal"] == "success"
    assert out["answer"] == "[1,2,3]"


def test_run_to_terminal_first_branch_can_fail(list_program):
    """Following alternative 0 commits to the leftmost branch."""
    s = start(list_program, "last [1,2,3]")
    out = tr.run_to(s, "terminal")
    assert out["terminal"] == "failure"
    assert s.notes


def test_run_to_steps(list_program):
    s = start(list_program, "last [1,2,3]")
    tr.run_to(s, ("steps", 2))
    assert s.cursor.path() == (0, 0)


def test_run_to_zero_steps_is_a_no_op(list_program):
    s = start(list_program, "last [1,2,3]")
    tr.run_to(s, ("steps", 0))
    assert s.cursor is s.root


def test_run_to_unknown_policy(list_program):
    s = start(list_program, "last [1,2]")
    with pytest.raises(tr.TraceError, match="unknown run_to policy"):
        tr.run_to(s, "sideways")


def test_breakpoint_check_includes_the_start_state(list_program):
    s = start(list_program, "conc [1] [2]")
    tr.set_breakpoint(s, "conc")
    before = json.dumps(tr.render(s), sort_keys=True)
    out = tr.run_to(s, "breakpoint")
    assert s.cursor is s.root
    assert json.dumps(out, sort_keys=True) == before


def test_breakpoint_stops_at_next_call(list_program):
    s = start(list_program, "conc [1] [2]")
    tr.set_breakpoint(s, "conc")
    tr.forward(s, 0)
    tr.run_to(s, "breakpoint")
    assert s.cursor.path() != (0,)
    pend = ev.pending_step(list_program, s.cursor.state)
    _, redex = ev.deref(s.cursor.state.heap, pend.redex)
    assert isinstance(redex, ev.NFun) and redex.name == "conc"


def test_cleared_breakpoint_no_longer_fires(list_program):
    s = start(list_program, "conc [1] [2]")
    tr.set_breakpoint(s, "conc")
    tr.clear_breakpoint(s, "conc")
    out = tr.run_to(s, "breakpoint")
    assert out["terminal"] == "success"


def test_run_to_with_no_breakpoints_reaches_terminal(list_program):
    s = start(list_program, "conc [1] [2]")
    out = tr.run_to(s, "breakpoint")
    assert out["terminal"] == "success"


def test_run_to_follows_first_alternatives_and_notes_branches():
    p = load_source(COIN_SRC, lang="mcy")
    s = start(p, "coin + coin")
    out = tr.run_to(s, "terminal")
    assert out["answer"] == "0"
    assert s.notes
    assert all(n["took"] == 0 and n["alternatives"] == 2 for n in s.notes)


def test_step_budget_stops_quietly():
    p = load_source("loop :: Int -> Int\nloop x = loop x", lang="mcy")
    s = start(p, "loop 1", step_budget=25)
    out = tr.run_to(s, "terminal")
    assert out["terminal"] == "running"
    assert len(s.cursor.path()) == 25


# --- rendering -------------------------------------------------------------------


def test_render_marks_redex_and_bound_variables(list_program):
    s = start(list_program, "conc ys [x] =:= [1,2,3] where ys, x free")
    seen_binding_step = False
    while True:
        out = tr.render(s)
        ids = set(tree_ids(out["tree"]))
        if out["redex"] is not None:
            assert out["redex"] in ids
        for vid in out["bound"]:
            assert vid in ids
            seen_binding_step = True
        kids = tr.children(s)
        if not kids:
            break
        tr.forward(s, 0)
    assert seen_binding_step


def test_render_lists_shared_subtrees():
    p = load_source("double x = x + x", lang="mcy")
    s = start(p, "double (1 + 2)")
    tr.forward(s, 0)  # unfold double; both occurrences now visible
    out = tr.render(s)
    inner = [nid for nid, n in s.cursor.state.heap.items()
             if isinstance(n, ev.NFun) and n.name == "+"
             and nid != out["root"]]
    shared = [i for i in out["shared"] if i in inner]
    assert len(shared) == 1
    assert sum(1 for i in tree_ids(out["tree"]) if i == shared[0]) == 2


def test_render_success_fields(list_program):
    s = start(list_program, "conc ys [x] =:= [1,2] where ys, x free")

    def find_success(node):
        if tr._status(s, node).kind == "success":
            return node
        for kid in tr.children(s, node):
            got = find_success(kid)
            if got:
                return got

    leaf = find_success(s.root)
    out = tr.render(s, leaf)
    assert out["terminal"] == "success"
    assert out["answer"] == "Success"
    assert dict(out["bindings"]) == {"ys": "[1]", "x": "2"}
    assert out["reason"] is None


def test_render_failure_fields(list_program):
    s = start(list_program, "0 =:= 1")
    out = tr.run_to(s, "terminal")
    assert out["terminal"] == "failure"
    assert out["reason"] == "clash: 0 =:= 1"
    assert out["answer"] is None


def test_render_case_patterns(list_program):
    s = start(list_program, "conc [1] [2]")
    tr.forward(s, 0)
    out = tr.render(s)

    def find_case(t):
        if t["kind"] == "case":
            return t
        for c in t["children"]:
            got = find_case(c)
            if got:
                return got

    case = find_case(out["tree"])
    assert case is not None
    assert case["label"] == "fcase"
    assert len(case["patterns"]) == 2
    assert case["patterns"][0] == "[]"
    assert ":" in case["patterns"][1]


# --- wire format -----------------------------------------------------------------


def test_export_has_the_wire_shape(list_program):
    s = start(list_program, "last [1,2]")
    tr.forward(s, 0)
    tr.forward(s, 0)
    data = tr.export_data(s)
    assert set(data) == {"nodes", "root", "cursor"}
    assert data["root"] == 0
    assert data["cursor"] == s.cursor.node_id
    by_id = {n["id"]: n for n in data["nodes"]}
    assert set(by_id) >= {0, s.cursor.node_id}
    for n in data["nodes"]:
        assert set(n) == {"id", "state", "stepinfo", "children", "terminal"}
        for c in n["children"]:
            assert c in by_id
    assert by_id[0]["stepinfo"] is None
    child = by_id[by_id[0]["children"][0]]
    assert set(child["stepinfo"]) == {"redex", "kind", "bound"}


def test_export_import_round_trip(list_program):
    s = start(list_program, "conc ys [x] =:= [1,2] where ys, x free")
    tr.run_to(s, "terminal")
    text = tr.export_trace(s)
    imported = tr.import_trace(text)
    assert tr.export_imported(imported) == text
    assert imported.root == 0
    assert imported.node(imported.cursor)["terminal"] == "failure"
    kinds = {n["terminal"] for n in imported.data["nodes"]}
    assert "running" in kinds


BAD_TRACES = [
    ("{not json", "not valid JSON"),
    ("[]", "expected an object with a node list"),
    ('{"nodes": 3}', "expected an object with a node list"),
    ('{"nodes": [{"id": "x"}], "root": 0, "cursor": 0}',
     "every node needs an integer id"),
    ('{"nodes": [{"id": 0, "state": {}, "children": [], "terminal": "t"},'
     ' {"id": 0, "state": {}, "children": [], "terminal": "t"}],'
     ' "root": 0, "cursor": 0}', "duplicate node id 0"),
    ('{"nodes": [{"id": 0, "children": [], "terminal": "t"}],'
     ' "root": 0, "cursor": 0}', "node 0 is missing 'state'"),
    ('{"nodes": [{"id": 0, "state": {}, "children": [], "terminal": "t",'
     ' "stepinfo": {"redex": 1}}], "root": 0, "cursor": 0}',
     "node 0 has a malformed stepinfo"),
    ('{"nodes": [{"id": 0, "state": {}, "children": [7], "terminal": "t"}],'
     ' "root": 0, "cursor": 0}', "child 7 of 0 is missing"),
    ('{"nodes": [{"id": 0, "state": {}, "children": [], "terminal": "t"}],'
     ' "root": 5, "cursor": 0}', "root does not name a node"),
    ('{"nodes": [{"id": 0, "state": {}, "children": [], "terminal": "t"}],'
     ' "root": 0, "cursor": 5}', "cursor does not name a node"),
]


@pytest.mark.parametrize("text,message", BAD_TRACES,
                         ids=[m[:30] for _, m in BAD_TRACES])
def test_import_rejects_malformed_traces(text, message):
    with pytest.raises(tr.TraceFormatError, match=message):
        tr.import_trace(text)


def test_exported_states_can_replay_without_the_program(list_program):
    """A client can follow child edges using only exported data."""
    s = start(list_program, "conc [1] [2]")
    tr.run_to(s, "terminal")
    data = tr.export_data(s)
    by_id = {n["id"]: n for n in data["nodes"]}
    node = by_id[data["root"]]
    depth = 0
    while node["children"]:
        node = by_id[node["children"][0]]
        depth += 1
    assert node["terminal"] == "success"
    assert node["state"]["answer"] == "[1,2]"
    assert depth == node["state"]["step"]
