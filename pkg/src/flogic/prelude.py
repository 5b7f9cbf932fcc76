"""Builtin functions and predeclared data types.

Every module implicitly knows ``Bool``, ``Success`` and the list type, plus
a small set of primitively implemented functions: the equational constraint,
the two conjunction operators, guarded expressions and integer arithmetic.
``Int`` itself is primitive and has no declaration; integer literals are the
only way to produce one.
"""

from __future__ import annotations

from .ir import (
    ConsDecl, External, FuncDecl, Program, TCons, TVar, TypeDecl, func_type,
)

INT = TCons("Int")
BOOL = TCons("Bool")
SUCCESS = TCons("Success")


def list_of(t) -> TCons:
    return TCons("List", (t,))


PRELUDE_TYPES: tuple[TypeDecl, ...] = (
    TypeDecl("Bool", (), (ConsDecl("True", 0), ConsDecl("False", 0))),
    TypeDecl("List", ("a",), (
        ConsDecl("[]", 0),
        ConsDecl(":", 2, (TVar("a"), list_of(TVar("a")))),
    )),
    TypeDecl("Success", (), (ConsDecl("Success", 0),)),
)


def _ext(name: str, arity: int, sig) -> FuncDecl:
    return FuncDecl(name, arity, sig, External(name))


_A = TVar("a")

BUILTINS: dict[str, FuncDecl] = {
    f.name: f for f in (
        _ext("=:=", 2, func_type(_A, _A, SUCCESS)),
        _ext("&", 2, func_type(SUCCESS, SUCCESS, SUCCESS)),
        _ext("&>", 2, func_type(SUCCESS, _A, _A)),
        _ext("cond", 2, func_type(SUCCESS, _A, _A)),
        _ext("+", 2, func_type(INT, INT, INT)),
        _ext("-", 2, func_type(INT, INT, INT)),
        _ext("*", 2, func_type(INT, INT, INT)),
        _ext("==", 2, func_type(INT, INT, BOOL)),
        _ext("<", 2, func_type(INT, INT, BOOL)),
        _ext("<=", 2, func_type(INT, INT, BOOL)),
        _ext("failed", 0, _A),
    )
}


def ensure_prelude(program: Program) -> Program:
    """Add the predeclared types a module did not declare itself."""
    have = {t.name for t in program.types}
    missing = tuple(t for t in PRELUDE_TYPES if t.name not in have)
    if not missing:
        return program
    return Program(
        program.name, program.imports, missing + program.types,
        program.functions, program.operators, program.name_table,
    )


def is_builtin(name: str) -> bool:
    return name in BUILTINS
