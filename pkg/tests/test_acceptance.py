"""End-to-end acceptance checks.

Each test covers one headline behavior, prints a single PASS/FAIL line
and enforces a wall-clock limit.  Run with -s (or read captured output)
to see the lines.
"""

import json
import random
import time
from collections import Counter
from contextlib import contextmanager

from corpus import FUNCTIONAL_CORPUS
from oracles import evaluate, generate_and_test_conc, show_value
from flogic import analysis as an
from flogic import evaluator as ev
from flogic import trace as tr
from flogic.ir import (
    Branch, Case, Cons, ConsPat, FuncDecl, FunCall, Rule, Var, alpha_equal,
)
from flogic.loaders import load_source
from flogic.surface import compile_goal


@contextmanager
def criterion(number, label, limit_seconds):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"criterion {number} ({label}): FAIL")
        raise
    elapsed = time.perf_counter() - started
    line = (f"criterion {number} ({label}): "
            f"{'PASS' if elapsed < limit_seconds else 'FAIL'} "
            f"[{elapsed:.3f}s, limit {limit_seconds}s]")
    print(line)
    assert elapsed < limit_seconds, line


NAT_SRC = """
data Nat = 0 | Succ Nat

leq :: Nat -> Nat -> Bool
leq 0        _        = True
leq (Succ x) 0        = False
leq (Succ x) (Succ y) = leq x y
"""

LIST_SRC = """
conc :: [a] -> [a] -> [a]
conc eval flex
conc []     ys = ys
conc (x:xs) ys = x : conc xs ys

last :: [a] -> a
last xs | conc ys [x] =:= xs = x where ys, x free
"""

APP_SRC = """app([],L,L).
app([H|T],L,[H|R]) :- app(T,L,R).
"""

SYNC_SRC = """
sync :: Int -> Success
sync eval rigid
sync 0 = Success
"""


def test_criterion_1_pattern_compilation():
    with criterion(1, "pattern compilation", 1.0):
        program = load_source(NAT_SRC, lang="mcy")
        expected = FuncDecl("leq", 2, None, Rule((1, 2), Case(
            "rigid", Var(1), (
                Branch(ConsPat("0", ()), Cons("True", ())),
                Branch(ConsPat("Succ", (3,)), Case("rigid", Var(2), (
                    Branch(ConsPat("0", ()), Cons("False", ())),
                    Branch(ConsPat("Succ", (4,)),
                           FunCall("leq", (Var(3), Var(4))))))),
            ))))
        assert alpha_equal(program.function("leq"), expected)


def test_criterion_2_clause_translation():
    with criterion(2, "clause translation", 1.0):
        program = load_source(APP_SRC, lang="prolog")
        expected = FuncDecl("app", 3, None, Rule((1, 2, 3), Case(
            "flex", Var(1), (
                Branch(ConsPat("[]", ()),
                       FunCall("=:=", (Var(2), Var(3)))),
                Branch(ConsPat(":", (4, 5)), Case("flex", Var(3), (
                    Branch(ConsPat(":", (6, 7)),
                           FunCall("&>", (
                               FunCall("=:=", (Var(4), Var(6))),
                               FunCall("app", (Var(5), Var(2), Var(7)))))),
                ))),
            ))))
        assert alpha_equal(program.function("app"), expected)


def test_criterion_3_analysis_suite():
    with criterion(3, "analysis suite", 1.0):
        program = load_source(LIST_SRC, lang="mcy")
        registry = an.default_registry()

        def text(name, fn):
            result = registry.get(name)(program, fn)
            return result.text

        assert text("Overlapping Rules", "conc") == "not overlapping"
        assert text("Completeness", "conc") == "complete"
        assert text("Get Type", "conc") == "[a] -> [a] -> [a]"
        assert set(text("Dead Code", "conc").split(", ")) == {"last"}
        assert set(text("Called By", "conc").split(", ")) == {"conc", "last"}


def test_criterion_4_narrowing():
    with criterion(4, "narrowing", 5.0):
        program = load_source(LIST_SRC, lang="mcy")
        goal, hints = compile_goal(
            program, "conc ys [x] =:= [1,2,3] where ys, x free")
        result = ev.solve(program, goal, ev.SolveConfig(), hints=hints)
        assert len(result.answers) == 1
        (answer,) = result.answers
        assert answer.show_bindings() == "ys = [1,2], x = 3"

        oracle = generate_and_test_conc(program, [1, 2, 3], {1, 2, 3}, 5)
        assert oracle == [((1, 2), 3)]
        assert len(result.answers) == len(oracle)


def test_criterion_5_residuation():
    with criterion(5, "residuation", 1.0):
        program = load_source(SYNC_SRC, lang="mcy")

        goal, hints = compile_goal(program, "sync x where x free")
        bare = ev.solve(program, goal, ev.SolveConfig(), hints=hints)
        assert bare.answers == [] and bare.floundered

        goal, hints = compile_goal(program,
                                   "(x =:= 0) & sync x where x free")
        bound = ev.solve(program, goal, ev.SolveConfig(), hints=hints)
        assert [a.show_bindings() for a in bound.answers] == ["x = 0"]
        assert not bound.floundered


def test_criterion_6_sharing():
    with criterion(6, "sharing", 1.0):
        program = load_source("double x = x + x", lang="mcy")
        goal, _ = compile_goal(program, "double (1 + 2)")
        state = ev.inject(program, goal)
        (inner,) = [nid for nid, node in state.heap.items()
                    if isinstance(node, ev.NFun) and node.name == "+"]

        contractions = 0
        while not ev.is_terminal(program, state):
            (state, info), = ev.step(program, state)
            if info.redex == inner:
                contractions += 1
                root_id, outer = ev.deref(state.heap, state.root)
                reads = [ev.deref(state.heap, a) for a in outer.args]
                assert [n.value for _, n in reads] == [3, 3]
                assert reads[0][0] == reads[1][0]
        assert contractions == 1
        status = ev.classify(program, state)
        assert status.kind == "success"
        assert ev.readback(state.heap, state.root).value == 6


def test_criterion_7_memoization():
    with criterion(7, "memoization", 1.0):
        program = load_source(LIST_SRC, lang="mcy")
        counts = Counter()

        def counted(name, fn):
            def wrapper(p, f, _name=name, _fn=fn):
                counts[(_name, f)] += 1
                return _fn(p, f)
            return wrapper

        registry = an.AnalysisRegistry(tuple(
            (name, counted(name, fn))
            for name, fn in an.default_registry().entries))
        cache = an.AnalysisCache()
        version = an.program_version(program)
        rng = random.Random(7)
        names = registry.names()
        for _ in range(100):
            name = rng.choice(names)
            fn = rng.choice(["conc", "last"])
            an.analyze(cache, registry, program, name, fn, version=version)
        assert counts
        assert max(counts.values()) <= 1


def test_criterion_8_trace_reversibility():
    with criterion(8, "trace reversibility", 10.0):
        program = load_source(LIST_SRC, lang="mcy")
        goal, hints = compile_goal(
            program, "conc ys [x] =:= [1,2,3] where ys, x free")
        for seed in range(100):
            rng = random.Random(seed)
            session = tr.start(program, goal, hints)
            snapshots = [json.dumps(tr.render(session), sort_keys=True)]
            for _ in range(50):
                kids = tr.children(session)
                if not kids:
                    break
                tr.forward(session, rng.randrange(len(kids)))
                snapshots.append(json.dumps(tr.render(session),
                                            sort_keys=True))
            while session.cursor.parent is not None:
                snapshots.pop()
                tr.backward(session)
                rendered = json.dumps(tr.render(session), sort_keys=True)
                assert rendered == snapshots[-1]
            assert session.cursor is session.root


def test_criterion_9_deterministic_evaluation():
    with criterion(9, "deterministic evaluation", 10.0):
        assert len(FUNCTIONAL_CORPUS) >= 20
        for name, src, goal_text, expected in FUNCTIONAL_CORPUS:
            program = load_source(src, lang="mcy")
            goal, _ = compile_goal(program, goal_text)

            state = ev.inject(program, goal)
            while not ev.is_terminal(program, state):
                alternatives = ev.step(program, state)
                assert len(alternatives) == 1, name
                state = alternatives[0][0]
            assert ev.classify(program, state).kind == "success"

            result = ev.solve(program, goal, ev.SolveConfig())
            assert [a.show_value() for a in result.answers] == [expected]
            assert show_value(evaluate(program, goal)) == expected, name
