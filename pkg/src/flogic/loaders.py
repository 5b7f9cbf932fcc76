"""Front-end dispatch: source text to a validated, typed program.

Three input languages are supported: the equational surface language
(``mcy``), pure Prolog (``prolog``) and the JSON flat form (``flat``).
Selection is by file extension, overridable by an explicit language name.

Loading always validates and runs type inference.  For surface modules one
extra pass applies afterwards: an unannotated, unsigned function whose
inferred result type turns out to be the constraint type gets flexible
cases, completing the default-annotation rule that could not be decided
before inference.
"""

from __future__ import annotations

import os
from dataclasses import replace
from typing import Optional

from .ir import (
    Branch, Case, Expr, External, Free, FuncDecl, Or, Program, Rule, TCons,
    ValidationError, parse_ir, result_type, validate,
)
from .infer import infer_types
from .prolog import compile_prolog
from .surface import compile_goal, compile_module
from . import prelude

LANGUAGES = ("mcy", "prolog", "flat")

_EXTENSIONS = {".mcy": "mcy", ".pl": "prolog", ".json": "flat"}


class UnknownLanguageError(Exception):
    pass


def language_for_path(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    lang = _EXTENSIONS.get(ext)
    if lang is None:
        raise UnknownLanguageError(
            f"cannot infer language from {path!r}; use one of {LANGUAGES}")
    return lang


def load_source(text: str, lang: str, module: str = "Main") -> Program:
    """Parse, compile, validate and type one module of source text."""
    if lang == "mcy":
        program, pinned = compile_module(text, module)
    elif lang == "prolog":
        program, pinned = compile_prolog(text, module)
    elif lang == "flat":
        program = prelude.ensure_prelude(parse_ir(text))
        pinned = {f.name for f in program.functions}
    else:
        raise UnknownLanguageError(f"unknown language {lang!r}")
    violations = validate(program)
    if violations:
        raise ValidationError(violations)
    program = infer_types(program)
    return _flip_constraint_functions(program, pinned)


def load_path(path: str, lang: Optional[str] = None) -> Program:
    if lang is None:
        lang = language_for_path(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    module = os.path.splitext(os.path.basename(path))[0]
    return load_source(text, lang, module or "Main")


def _flip_constraint_functions(program: Program, pinned: set[str]) -> Program:
    out = []
    for f in program.functions:
        if (f.name in pinned or isinstance(f.rule, External)
                or f.signature is None
                or result_type(f.signature) != TCons("Success")):
            out.append(f)
            continue
        rule = f.rule
        out.append(replace(f, rule=Rule(rule.params, _flex(rule.body),
                                        rule.hints)))
    return replace(program, functions=tuple(out))


def _flex(e: Expr) -> Expr:
    if isinstance(e, Case):
        return Case("flex", _flex(e.scrutinee),
                    tuple(Branch(b.pattern, _flex(b.body)) for b in e.branches))
    if isinstance(e, Or):
        return Or(_flex(e.left), _flex(e.right))
    if isinstance(e, Free):
        return Free(e.vars, _flex(e.body))
    return e


__all__ = [
    "LANGUAGES", "UnknownLanguageError", "language_for_path",
    "load_source", "load_path", "compile_goal",
]
