"""Prolog front end: clause translation and adequacy against resolution."""

import itertools

import pytest

from oracles import sld_provable
from flogic import evaluator as ev
from flogic import prolog as pl
from flogic.ir import (
    Branch, Case, ConsPat, Cons, FunCall, FuncDecl, Rule, Var, alpha_equal,
    validate,
)
from flogic.loaders import load_source
from flogic.surface import compile_goal


def test_fact_becomes_equation():
    p = load_source("p(a).", lang="prolog")
    expected = FuncDecl("p", 1, None, Rule(
        (1,), FunCall("=:=", (Var(1), Cons("a", ())))))
    assert alpha_equal(p.function("p"), expected)


def test_conjunction_becomes_sequential_and():
    p = load_source("p(a).\nq(X) :- p(X), p(X).", lang="prolog")
    expected = FuncDecl("q", 1, None, Rule(
        (1,), FunCall("&>", (FunCall("p", (Var(1),)),
                             FunCall("p", (Var(1),))))))
    assert alpha_equal(p.function("q"), expected)


def test_app_translates_to_flex_case_nesting(app_program):
    """Two app/3 clauses discriminate on the first argument, then unify."""
    expected = FuncDecl("app", 3, None, Rule((1, 2, 3), Case(
        "flex", Var(1), (
            Branch(ConsPat("[]", ()), FunCall("=:=", (Var(2), Var(3)))),
            Branch(ConsPat(":", (4, 5)), Case("flex", Var(3), (
                Branch(ConsPat(":", (6, 7)), FunCall("&>", (
                    FunCall("=:=", (Var(4), Var(6))),
                    FunCall("app", (Var(5), Var(2), Var(7)))))),
            ))),
        ))))
    assert alpha_equal(app_program.function("app"), expected)


def test_translated_predicates_are_flex(app_program):
    assert app_program.function("app").rule.body.kind == "flex"


def test_translated_program_validates(app_program):
    assert validate(app_program) == []


def test_cut_rejected():
    with pytest.raises(pl.UnsupportedPrologError, match=r"cut \(!\)"):
        load_source("p(X) :- !.", lang="prolog")


def test_negation_rejected():
    with pytest.raises(pl.UnsupportedPrologError, match=r"negation"):
        load_source("p(X) :- \\+ q(X).", lang="prolog")


def test_unsupported_error_is_a_prolog_error():
    assert issubclass(pl.UnsupportedPrologError, pl.PrologError)
    assert issubclass(pl.PrologSyntaxError, pl.PrologError)


def test_parse_error_carries_line():
    with pytest.raises(pl.PrologSyntaxError, match="line 2"):
        pl.parse_prolog("p(a).\nq(a")


# --- adequacy: evaluator solutions == resolution on ground goals ------------


def _lists(elements, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(elements, repeat=n)


def _goal_list(items):
    return "[" + ",".join(items) + "]"


def _pterm_list(items):
    out = pl.PAtom("[]")
    for x in reversed(items):
        out = pl.PCompound(":", (pl.PAtom(x), out))
    return out


# atoms have to occur in some clause to be declared as constructors
ADEQUACY_SRC = """elem(a).
elem(b).
app([],L,L).
app([H|T],L,[H|R]) :- app(T,L,R).
"""


def test_app_adequacy_against_resolution():
    """For every ground triple of short lists, the evaluator proves
    app(xs,ys,zs) exactly when depth-bounded SLD resolution does."""
    program = load_source(ADEQUACY_SRC, lang="prolog")
    clauses = pl.parse_prolog(ADEQUACY_SRC)
    lists = list(_lists(("a", "b"), 2))
    checked = disagreements = 0
    for xs, ys, zs in itertools.product(lists, repeat=3):
        goal_text = f"app {_goal_list(xs)} {_goal_list(ys)} {_goal_list(zs)}"
        expr, _ = compile_goal(program, goal_text)
        res = ev.solve(program, expr)
        evaluator_says = bool(res.answers)
        oracle_says = sld_provable(
            clauses,
            pl.PCompound("app", (_pterm_list(xs), _pterm_list(ys),
                                 _pterm_list(zs))))
        checked += 1
        if evaluator_says != oracle_says:
            disagreements += 1
    assert checked == 343
    assert disagreements == 0


def test_app_narrowing_matches_resolution_split():
    """Narrowing an open argument finds every split resolution finds."""
    program = load_source(ADEQUACY_SRC, lang="prolog")
    expr, hints = compile_goal(program,
                               "app xs ys [a,b] where xs, ys free")
    res = ev.solve(program, expr, hints=hints)
    got = sorted(a.show_bindings() for a in res.answers)
    assert got == [
        "xs = [], ys = [a,b]",
        "xs = [a,b], ys = []",
        "xs = [a], ys = [b]",
    ]
