"""Flat intermediate representation for functional-logic programs.

A program is a set of first-order function declarations, each defined by a
single rule whose right-hand side makes pattern matching explicit through
case expressions.  Two case kinds exist: a ``rigid`` case suspends when its
scrutinee is an unbound logic variable, a ``flex`` case narrows it (one
alternative per branch).  ``Or`` encodes the disjunction left behind by
overlapping rules, ``Free`` introduces fresh logic variables, and
``PartCall``/``Apply`` cover higher-order application.

Variables are locally unique numeric identifiers; display names live in a
side table (``Rule.hints``) that never takes part in structural equality.
All nodes are frozen dataclasses with tuple fields, so values can be shared
freely between sessions and threads.

The module also owns the JSON wire format (``parse_ir``/``serialize_ir``),
the static well-formedness check (``validate``) and alpha-equivalence
helpers used throughout the test-suite.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Literal, Optional, Union


class IRError(Exception):
    """Base class for everything this module raises."""


class IRSyntaxError(IRError):
    """Input was not syntactically valid JSON."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class IRSchemaError(IRError):
    """JSON was well-formed but did not match the program schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(IRError):
    """Raised when an operation requires a valid program and got violations."""

    def __init__(self, violations: list["Violation"]):
        lines = "; ".join(str(v) for v in violations[:8])
        super().__init__(f"invalid program: {lines}")
        self.violations = violations


# ---------------------------------------------------------------------------
# Names and types


@dataclass(frozen=True)
class QName:
    """Qualified name ``module.name``; both components must be non-empty."""

    module: str
    name: str

    def __post_init__(self):
        if not self.module or not self.name:
            raise ValueError("QName components must be non-empty")

    def __str__(self) -> str:
        return f"{self.module}.{self.name}"

    @staticmethod
    def parse(text: str) -> "QName":
        mod, dot, name = text.rpartition(".")
        if not dot:
            raise ValueError(f"not a qualified name: {text!r}")
        return QName(mod, name)


class TypeExpr:
    """Base class of type expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class TVar(TypeExpr):
    name: str


@dataclass(frozen=True)
class TCons(TypeExpr):
    name: str
    args: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class TFunc(TypeExpr):
    dom: TypeExpr
    rng: TypeExpr


def func_type(*parts: TypeExpr) -> TypeExpr:
    """Right-nested function type from a domain list plus result."""
    t = parts[-1]
    for dom in reversed(parts[:-1]):
        t = TFunc(dom, t)
    return t


def domains(t: TypeExpr) -> list[TypeExpr]:
    """Curried argument types of a signature (empty for non-arrows)."""
    out = []
    while isinstance(t, TFunc):
        out.append(t.dom)
        t = t.rng
    return out


def result_type(t: TypeExpr) -> TypeExpr:
    while isinstance(t, TFunc):
        t = t.rng
    return t


# ---------------------------------------------------------------------------
# Expressions and patterns


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    """Reference to a variable bound by a rule, a branch pattern or Free."""

    id: int


@dataclass(frozen=True)
class Lit(Expr):
    value: int


@dataclass(frozen=True)
class Cons(Expr):
    """Fully applied constructor application."""

    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class FunCall(Expr):
    """Saturated call of a declared function or builtin."""

    name: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class PartCall(Expr):
    """Partial application still missing ``missing`` >= 1 arguments.

    ``name`` may refer to a function or a constructor; saturation through
    ``Apply`` turns it into the corresponding call.
    """

    name: str
    missing: int
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class ConsPat:
    """Shallow constructor pattern ``c x1 .. xn`` with fresh variables."""

    name: str
    vars: tuple[int, ...] = ()


@dataclass(frozen=True)
class LitPat:
    value: int


Pattern = Union[ConsPat, LitPat]


@dataclass(frozen=True)
class Branch:
    pattern: Pattern
    body: Expr


@dataclass(frozen=True)
class Case(Expr):
    """Pattern match on the head of the scrutinee.

    ``rigid`` suspends on an unbound scrutinee (residuation), ``flex``
    nondeterministically binds it (narrowing).
    """

    kind: Literal["rigid", "flex"]
    scrutinee: Expr
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Or(Expr):
    """Don't-know choice between two alternatives (left tried first)."""

    left: Expr
    right: Expr


@dataclass(frozen=True)
class Free(Expr):
    """Existential introduction of fresh unbound logic variables."""

    vars: tuple[int, ...]
    body: Expr


@dataclass(frozen=True)
class Apply(Expr):
    """Application of an evaluated function value to one more argument."""

    fn: Expr
    arg: Expr


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class ConsDecl:
    name: str
    arity: int
    arg_types: tuple[TypeExpr, ...] = ()


@dataclass(frozen=True)
class TypeDecl:
    name: str
    params: tuple[str, ...]
    constructors: tuple[ConsDecl, ...]


@dataclass(frozen=True)
class Rule:
    """Single defining rule: pairwise distinct params, one body expression.

    ``hints`` maps variable ids to surface names purely for display; it is
    excluded from equality so two alpha-identical rules compare equal no
    matter where they were parsed from.
    """

    params: tuple[int, ...]
    body: Expr
    hints: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    def hint_map(self) -> dict[int, str]:
        return dict(self.hints)


@dataclass(frozen=True)
class External:
    """Marker for primitively implemented functions."""

    tag: str


@dataclass(frozen=True)
class FuncDecl:
    name: str
    arity: int
    signature: Optional[TypeExpr]
    rule: Union[Rule, External]

    @property
    def is_external(self) -> bool:
        return isinstance(self.rule, External)


@dataclass(frozen=True)
class OpDecl:
    name: str
    fixity: Literal["infixl", "infixr", "infix"]
    precedence: int


@dataclass(frozen=True)
class Program:
    """One module: types, functions, operator fixities and a name table.

    ``name_table`` maps external names to internal ones; the empty table
    means the identity mapping.
    """

    name: str
    imports: tuple[str, ...] = ()
    types: tuple[TypeDecl, ...] = ()
    functions: tuple[FuncDecl, ...] = ()
    operators: tuple[OpDecl, ...] = ()
    name_table: tuple[tuple[str, str], ...] = ()

    def function(self, name: str) -> Optional[FuncDecl]:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def constructor_owner(self, name: str) -> Optional[TypeDecl]:
        for t in self.types:
            for c in t.constructors:
                if c.name == name:
                    return t
        return None

    def constructor(self, name: str) -> Optional[ConsDecl]:
        for t in self.types:
            for c in t.constructors:
                if c.name == name:
                    return c
        return None


# ---------------------------------------------------------------------------
# Traversals


def subexprs(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression, including itself."""
    yield e
    if isinstance(e, (Cons, FunCall, PartCall)):
        for a in e.args:
            yield from subexprs(a)
    elif isinstance(e, Case):
        yield from subexprs(e.scrutinee)
        for b in e.branches:
            yield from subexprs(b.body)
    elif isinstance(e, Or):
        yield from subexprs(e.left)
        yield from subexprs(e.right)
    elif isinstance(e, Free):
        yield from subexprs(e.body)
    elif isinstance(e, Apply):
        yield from subexprs(e.fn)
        yield from subexprs(e.arg)


def called_functions(e: Expr) -> set[str]:
    """Names appearing in function position (constructors excluded)."""
    return {
        x.name for x in subexprs(e) if isinstance(x, (FunCall, PartCall))
    }


def or_in_expr(e: Expr) -> bool:
    return any(isinstance(x, Or) for x in subexprs(e))


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    """One well-formedness defect: the declaration, the broken rule, details."""

    decl: str
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.decl}: {self.detail}"


def validate(program: Program, builtins: Optional[dict] = None) -> list[Violation]:
    """Check every static invariant; an empty result means well-formed.

    ``builtins`` maps names of primitively known functions to their
    declarations (see ``prelude.BUILTINS``); calls resolve against module
    functions first, then builtins.
    """
    if builtins is None:
        from . import prelude

        builtins = prelude.BUILTINS
    out: list[Violation] = []
    bad = out.append

    # Type declarations: distinct names, declared arities, scoped tvars.
    seen_types: set[str] = set()
    cons_owner: dict[str, TypeDecl] = {}
    cons_decl: dict[str, ConsDecl] = {}
    for t in program.types:
        if t.name in seen_types:
            bad(Violation(t.name, "dup-type", "type declared twice"))
        seen_types.add(t.name)
        if len(set(t.params)) != len(t.params):
            bad(Violation(t.name, "dup-type-param", "repeated type parameter"))
        for c in t.constructors:
            if c.name in cons_owner:
                bad(Violation(c.name, "dup-constructor", "constructor declared twice"))
            cons_owner[c.name] = t
            cons_decl[c.name] = c
            if c.arity != len(c.arg_types):
                bad(Violation(c.name, "consdecl-arity",
                              f"arity {c.arity} but {len(c.arg_types)} argument types"))
            for at in c.arg_types:
                for tv in _type_vars(at):
                    if tv not in t.params:
                        bad(Violation(c.name, "typedecl-tvar",
                                      f"type variable {tv} not a parameter of {t.name}"))

    decl_params = {t.name: len(t.params) for t in program.types}

    def check_type(owner: str, te: TypeExpr):
        if isinstance(te, TCons):
            want = decl_params.get(te.name)
            if want is not None and want != len(te.args):
                bad(Violation(owner, "tcons-arity",
                              f"{te.name} expects {want} arguments, got {len(te.args)}"))
            for a in te.args:
                check_type(owner, a)
        elif isinstance(te, TFunc):
            check_type(owner, te.dom)
            check_type(owner, te.rng)

    for t in program.types:
        for c in t.constructors:
            for at in c.arg_types:
                check_type(c.name, at)

    # Operators.
    for op in program.operators:
        if op.fixity not in ("infixl", "infixr", "infix"):
            bad(Violation(op.name, "op-fixity", f"unknown fixity {op.fixity}"))
        if not 0 <= op.precedence <= 9:
            bad(Violation(op.name, "op-precedence", f"precedence {op.precedence} out of range"))

    # Functions.
    fun_arity = {f.name: f.arity for f in program.functions}
    for name, f in builtins.items():
        fun_arity.setdefault(name, f.arity)

    seen_funs: set[str] = set()
    for f in program.functions:
        if f.name in seen_funs:
            bad(Violation(f.name, "dup-function", "function declared twice"))
        seen_funs.add(f.name)

        if f.signature is not None:
            check_type(f.name, f.signature)
            if f.arity > len(domains(f.signature)):
                bad(Violation(f.name, "sig-arity",
                              f"arity {f.arity} exceeds {len(domains(f.signature))} curried domains"))

        if isinstance(f.rule, External):
            continue
        rule = f.rule
        if len(rule.params) != f.arity:
            bad(Violation(f.name, "rule-arity",
                          f"{len(rule.params)} parameters for arity {f.arity}"))
        if len(set(rule.params)) != len(rule.params):
            bad(Violation(f.name, "dup-param", "repeated rule parameter"))

        def walk(e: Expr, scope: frozenset[int]):
            if isinstance(e, Var):
                if e.id not in scope:
                    bad(Violation(f.name, "unbound-var", f"variable v{e.id} is not in scope"))
            elif isinstance(e, Lit):
                pass
            elif isinstance(e, Cons):
                c = cons_decl.get(e.name)
                if c is None:
                    bad(Violation(f.name, "unknown-constructor", f"constructor {e.name} not declared"))
                elif c.arity != len(e.args):
                    bad(Violation(f.name, "cons-arity",
                                  f"{e.name} expects {c.arity} arguments, got {len(e.args)}"))
                for a in e.args:
                    walk(a, scope)
            elif isinstance(e, FunCall):
                want = fun_arity.get(e.name)
                if want is None:
                    bad(Violation(f.name, "unknown-function", f"function {e.name} not declared"))
                elif want != len(e.args):
                    bad(Violation(f.name, "call-arity",
                                  f"{e.name} expects {want} arguments, got {len(e.args)}"))
                for a in e.args:
                    walk(a, scope)
            elif isinstance(e, PartCall):
                want = fun_arity.get(e.name)
                if want is None and e.name in cons_decl:
                    want = cons_decl[e.name].arity
                if want is None:
                    bad(Violation(f.name, "unknown-function", f"{e.name} not declared"))
                else:
                    if e.missing < 1:
                        bad(Violation(f.name, "part-arity", "missing count must be >= 1"))
                    elif want - e.missing != len(e.args):
                        bad(Violation(f.name, "part-arity",
                                      f"{e.name}: {len(e.args)} args with {e.missing} missing of {want}"))
                for a in e.args:
                    walk(a, scope)
            elif isinstance(e, Case):
                if not e.branches:
                    bad(Violation(f.name, "empty-case", "case with no branches"))
                walk(e.scrutinee, scope)
                heads: set[object] = set()
                families: set[str] = set()
                has_lit = has_cons = False
                for b in e.branches:
                    p = b.pattern
                    if isinstance(p, LitPat):
                        has_lit = True
                        key: object = ("lit", p.value)
                        bscope = scope
                    else:
                        has_cons = True
                        key = ("cons", p.name)
                        c = cons_decl.get(p.name)
                        if c is None:
                            bad(Violation(f.name, "unknown-constructor",
                                          f"pattern constructor {p.name} not declared"))
                        else:
                            families.add(cons_owner[p.name].name)
                            if c.arity != len(p.vars):
                                bad(Violation(f.name, "pattern-arity",
                                              f"{p.name} expects {c.arity} variables, got {len(p.vars)}"))
                        if len(set(p.vars)) != len(p.vars):
                            bad(Violation(f.name, "pattern-dup-var", f"repeated variable in {p.name} pattern"))
                        for v in p.vars:
                            if v in scope:
                                bad(Violation(f.name, "rebound-var",
                                              f"pattern variable v{v} shadows an enclosing binding"))
                        bscope = scope | frozenset(p.vars)
                    if key in heads:
                        bad(Violation(f.name, "case-dup-constructor",
                                      f"duplicate branch for {key[1]}"))
                    heads.add(key)
                    walk(b.body, bscope)
                if has_lit and has_cons:
                    bad(Violation(f.name, "case-lit-mix",
                                  "literal and constructor patterns in one case"))
                if len(families) > 1:
                    bad(Violation(f.name, "case-type-mix",
                                  f"branch constructors from several types: {sorted(families)}"))
            elif isinstance(e, Or):
                walk(e.left, scope)
                walk(e.right, scope)
            elif isinstance(e, Free):
                if len(set(e.vars)) != len(e.vars):
                    bad(Violation(f.name, "dup-free-var", "repeated free variable"))
                for v in e.vars:
                    if v in scope:
                        bad(Violation(f.name, "rebound-var",
                                      f"free variable v{v} shadows an enclosing binding"))
                walk(e.body, scope | frozenset(e.vars))
            elif isinstance(e, Apply):
                walk(e.fn, scope)
                walk(e.arg, scope)
            else:
                bad(Violation(f.name, "unknown-node", f"unexpected node {type(e).__name__}"))

        walk(rule.body, frozenset(rule.params))

    for ext, internal in program.name_table:
        if not ext or not internal:
            bad(Violation(program.name, "name-table", "empty name in name table"))

    return out


def _type_vars(t: TypeExpr) -> Iterator[str]:
    if isinstance(t, TVar):
        yield t.name
    elif isinstance(t, TCons):
        for a in t.args:
            yield from _type_vars(a)
    elif isinstance(t, TFunc):
        yield from _type_vars(t.dom)
        yield from _type_vars(t.rng)


# ---------------------------------------------------------------------------
# JSON wire format
#
# Expressions are tagged arrays:
#   ["var","v1"]  ["lit",3]  ["call","fn","conc",[...]]  ["call","cons",":",[...]]
#   ["call","part","conc",1,[...]]  ["case"|"fcase", scrut, [[pat, body],...]]
#   ["or",l,r]  ["free",["v1","v2"],body]  ["apply",f,a]
# with pat either ["pat", name, [vars]] or ["lpat", value].
# The serializer always writes canonical variable names v<id>; the parser
# additionally accepts arbitrary identifiers and interns them per function.

_VNAME = re.compile(r"^v(\d+)$")


def serialize_ir(program: Program) -> str:
    """Render a valid program to deterministic JSON text."""
    violations = validate(program)
    if violations:
        raise ValidationError(violations)
    doc = {
        "module": program.name,
        "imports": list(program.imports),
        "types": [_type_decl_json(t) for t in program.types],
        "functions": [_func_json(f) for f in program.functions],
        "operators": [
            {"name": o.name, "fixity": o.fixity, "precedence": o.precedence}
            for o in program.operators
        ],
        "nametable": [list(pair) for pair in program.name_table],
    }
    return json.dumps(doc, indent=1)


def _type_expr_json(t: TypeExpr):
    if isinstance(t, TVar):
        return ["tvar", t.name]
    if isinstance(t, TCons):
        return ["tcons", t.name, [_type_expr_json(a) for a in t.args]]
    if isinstance(t, TFunc):
        return ["func", _type_expr_json(t.dom), _type_expr_json(t.rng)]
    raise TypeError(f"not a type expression: {t!r}")


def _type_decl_json(t: TypeDecl):
    return {
        "name": t.name,
        "params": list(t.params),
        "constructors": [
            {"name": c.name, "arity": c.arity,
             "args": [_type_expr_json(a) for a in c.arg_types]}
            for c in t.constructors
        ],
    }


def _expr_json(e: Expr):
    if isinstance(e, Var):
        return ["var", f"v{e.id}"]
    if isinstance(e, Lit):
        return ["lit", e.value]
    if isinstance(e, Cons):
        return ["call", "cons", e.name, [_expr_json(a) for a in e.args]]
    if isinstance(e, FunCall):
        return ["call", "fn", e.name, [_expr_json(a) for a in e.args]]
    if isinstance(e, PartCall):
        return ["call", "part", e.name, e.missing, [_expr_json(a) for a in e.args]]
    if isinstance(e, Case):
        tag = "fcase" if e.kind == "flex" else "case"
        return [tag, _expr_json(e.scrutinee),
                [[_pattern_json(b.pattern), _expr_json(b.body)] for b in e.branches]]
    if isinstance(e, Or):
        return ["or", _expr_json(e.left), _expr_json(e.right)]
    if isinstance(e, Free):
        return ["free", [f"v{v}" for v in e.vars], _expr_json(e.body)]
    if isinstance(e, Apply):
        return ["apply", _expr_json(e.fn), _expr_json(e.arg)]
    raise TypeError(f"not an expression: {e!r}")


def _pattern_json(p: Pattern):
    if isinstance(p, LitPat):
        return ["lpat", p.value]
    return ["pat", p.name, [f"v{v}" for v in p.vars]]


def _func_json(f: FuncDecl):
    doc = {
        "name": f.name,
        "arity": f.arity,
        "signature": None if f.signature is None else _type_expr_json(f.signature),
    }
    if isinstance(f.rule, External):
        doc["external"] = f.rule.tag
    else:
        doc["rule"] = {
            "params": [f"v{p}" for p in f.rule.params],
            "body": _expr_json(f.rule.body),
        }
    return doc


class _VarNames:
    """Per-function interner mapping wire names to numeric ids.

    Canonical names ``v<n>`` keep their number; any other identifier gets
    the smallest id not reserved by a canonical name, in first-occurrence
    order, so parsing is deterministic.
    """

    def __init__(self, reserved: set[int]):
        self.reserved = set(reserved)
        self.map: dict[str, int] = {}
        self.next = 1

    def intern(self, name: str, path: str) -> int:
        if not isinstance(name, str) or not name:
            raise IRSchemaError(path, "variable name must be a non-empty string")
        m = _VNAME.match(name)
        if m:
            return int(m.group(1))
        if name in self.map:
            return self.map[name]
        while self.next in self.reserved:
            self.next += 1
        self.reserved.add(self.next)
        self.map[name] = self.next
        return self.map[name]


def _collect_vnames(obj, acc: set[int]):
    if isinstance(obj, str):
        m = _VNAME.match(obj)
        if m:
            acc.add(int(m.group(1)))
    elif isinstance(obj, list):
        for x in obj:
            _collect_vnames(x, acc)
    elif isinstance(obj, dict):
        for x in obj.values():
            _collect_vnames(x, acc)


def parse_ir(text: str) -> Program:
    """Parse the JSON wire format back into a Program.

    Syntax errors report line/column; schema errors name the offending
    field.  The result of ``parse_ir(serialize_ir(p))`` is structurally
    equal to ``p`` (display hints aside).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise IRSyntaxError(e.msg, e.lineno, e.colno) from None

    def need(d, key, path, kind):
        if not isinstance(d, dict):
            raise IRSchemaError(path, f"expected an object, got {type(d).__name__}")
        if key not in d:
            raise IRSchemaError(f"{path}.{key}", "missing field")
        v = d[key]
        if kind is not None and not isinstance(v, kind):
            raise IRSchemaError(f"{path}.{key}", f"expected {kind.__name__}")
        return v

    if not isinstance(doc, dict):
        raise IRSchemaError("$", "top level must be an object")
    known = {"module", "imports", "types", "functions", "operators", "nametable"}
    extra = set(doc) - known
    if extra:
        raise IRSchemaError(f"$.{sorted(extra)[0]}", "unknown field")

    module = need(doc, "module", "$", str)
    imports = tuple(need(doc, "imports", "$", list))
    for i, imp in enumerate(imports):
        if not isinstance(imp, str):
            raise IRSchemaError(f"$.imports[{i}]", "expected str")

    types = []
    for i, td in enumerate(need(doc, "types", "$", list)):
        path = f"$.types[{i}]"
        cons = []
        for j, cd in enumerate(need(td, "constructors", path, list)):
            cpath = f"{path}.constructors[{j}]"
            cons.append(ConsDecl(
                need(cd, "name", cpath, str),
                need(cd, "arity", cpath, int),
                tuple(_parse_type(a, f"{cpath}.args[{k}]")
                      for k, a in enumerate(need(cd, "args", cpath, list))),
            ))
        params = need(td, "params", path, list)
        if not all(isinstance(p, str) for p in params):
            raise IRSchemaError(f"{path}.params", "expected list of str")
        types.append(TypeDecl(need(td, "name", path, str), tuple(params), tuple(cons)))

    functions = []
    for i, fd in enumerate(need(doc, "functions", "$", list)):
        path = f"$.functions[{i}]"
        name = need(fd, "name", path, str)
        arity = need(fd, "arity", path, int)
        sig_doc = need(fd, "signature", path, None)
        sig = None if sig_doc is None else _parse_type(sig_doc, f"{path}.signature")
        if "external" in fd:
            if "rule" in fd:
                raise IRSchemaError(path, "both rule and external given")
            tag = fd["external"]
            if not isinstance(tag, str):
                raise IRSchemaError(f"{path}.external", "expected str")
            functions.append(FuncDecl(name, arity, sig, External(tag)))
            continue
        rd = need(fd, "rule", path, dict)
        reserved: set[int] = set()
        _collect_vnames(rd, reserved)
        names = _VarNames(reserved)
        params = tuple(names.intern(p, f"{path}.rule.params")
                       for p in need(rd, "params", f"{path}.rule", list))
        body = _parse_expr(need(rd, "body", f"{path}.rule", None),
                           f"{path}.rule.body", names)
        functions.append(FuncDecl(name, arity, sig, Rule(params, body)))

    operators = []
    for i, od in enumerate(need(doc, "operators", "$", list)):
        path = f"$.operators[{i}]"
        operators.append(OpDecl(
            need(od, "name", path, str),
            need(od, "fixity", path, str),
            need(od, "precedence", path, int),
        ))

    table = []
    for i, pair in enumerate(need(doc, "nametable", "$", list)):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)):
            raise IRSchemaError(f"$.nametable[{i}]", "expected a pair of strings")
        table.append((pair[0], pair[1]))

    return Program(module, imports, tuple(types), tuple(functions),
                   tuple(operators), tuple(table))


def _parse_type(doc, path: str) -> TypeExpr:
    if not isinstance(doc, list) or not doc or not isinstance(doc[0], str):
        raise IRSchemaError(path, "expected a tagged type array")
    tag = doc[0]
    if tag == "tvar":
        if len(doc) != 2 or not isinstance(doc[1], str):
            raise IRSchemaError(path, "tvar takes one name")
        return TVar(doc[1])
    if tag == "tcons":
        if len(doc) != 3 or not isinstance(doc[1], str) or not isinstance(doc[2], list):
            raise IRSchemaError(path, "tcons takes a name and an argument list")
        return TCons(doc[1], tuple(_parse_type(a, f"{path}[{i}]")
                                   for i, a in enumerate(doc[2])))
    if tag == "func":
        if len(doc) != 3:
            raise IRSchemaError(path, "func takes domain and range")
        return TFunc(_parse_type(doc[1], f"{path}.dom"), _parse_type(doc[2], f"{path}.rng"))
    raise IRSchemaError(path, f"unknown type tag {tag!r}")


def _parse_expr(doc, path: str, names: _VarNames) -> Expr:
    if not isinstance(doc, list) or not doc or not isinstance(doc[0], str):
        raise IRSchemaError(path, "expected a tagged expression array")
    tag = doc[0]
    if tag == "var":
        if len(doc) != 2:
            raise IRSchemaError(path, "var takes one name")
        return Var(names.intern(doc[1], path))
    if tag == "lit":
        if len(doc) != 2 or not isinstance(doc[1], int) or isinstance(doc[1], bool):
            raise IRSchemaError(path, "lit takes one integer")
        return Lit(doc[1])
    if tag == "call":
        if len(doc) < 2 or doc[1] not in ("fn", "cons", "part"):
            raise IRSchemaError(path, "call flavor must be fn, cons or part")
        flavor = doc[1]
        if flavor == "part":
            if len(doc) != 5 or not isinstance(doc[2], str) \
                    or not isinstance(doc[3], int) or not isinstance(doc[4], list):
                raise IRSchemaError(path, "part call takes name, missing count, args")
            args = tuple(_parse_expr(a, f"{path}[{i}]", names)
                         for i, a in enumerate(doc[4]))
            return PartCall(doc[2], doc[3], args)
        if len(doc) != 4 or not isinstance(doc[2], str) or not isinstance(doc[3], list):
            raise IRSchemaError(path, "call takes a name and an argument list")
        args = tuple(_parse_expr(a, f"{path}[{i}]", names)
                     for i, a in enumerate(doc[3]))
        return Cons(doc[2], args) if flavor == "cons" else FunCall(doc[2], args)
    if tag in ("case", "fcase"):
        if len(doc) != 3 or not isinstance(doc[2], list):
            raise IRSchemaError(path, "case takes a scrutinee and a branch list")
        scrut = _parse_expr(doc[1], f"{path}.scrut", names)
        branches = []
        for i, br in enumerate(doc[2]):
            bpath = f"{path}.branches[{i}]"
            if not isinstance(br, list) or len(br) != 2:
                raise IRSchemaError(bpath, "branch must be [pattern, body]")
            branches.append(Branch(_parse_pattern(br[0], bpath, names),
                                   _parse_expr(br[1], f"{bpath}.body", names)))
        return Case("flex" if tag == "fcase" else "rigid", scrut, tuple(branches))
    if tag == "or":
        if len(doc) != 3:
            raise IRSchemaError(path, "or takes two alternatives")
        return Or(_parse_expr(doc[1], f"{path}.left", names),
                  _parse_expr(doc[2], f"{path}.right", names))
    if tag == "free":
        if len(doc) != 3 or not isinstance(doc[1], list):
            raise IRSchemaError(path, "free takes a variable list and a body")
        vs = tuple(names.intern(v, f"{path}.vars[{i}]") for i, v in enumerate(doc[1]))
        return Free(vs, _parse_expr(doc[2], f"{path}.body", names))
    if tag == "apply":
        if len(doc) != 3:
            raise IRSchemaError(path, "apply takes a function and an argument")
        return Apply(_parse_expr(doc[1], f"{path}.fn", names),
                     _parse_expr(doc[2], f"{path}.arg", names))
    raise IRSchemaError(path, f"unknown expression tag {tag!r}")


def _parse_pattern(doc, path: str, names: _VarNames) -> Pattern:
    if not isinstance(doc, list) or not doc:
        raise IRSchemaError(path, "expected a pattern array")
    if doc[0] == "lpat":
        if len(doc) != 2 or not isinstance(doc[1], int) or isinstance(doc[1], bool):
            raise IRSchemaError(path, "lpat takes one integer")
        return LitPat(doc[1])
    if doc[0] == "pat":
        if len(doc) != 3 or not isinstance(doc[1], str) or not isinstance(doc[2], list):
            raise IRSchemaError(path, "pat takes a constructor name and variables")
        return ConsPat(doc[1], tuple(names.intern(v, f"{path}[{i}]")
                                     for i, v in enumerate(doc[2])))
    raise IRSchemaError(path, f"unknown pattern tag {doc[0]!r}")


# ---------------------------------------------------------------------------
# Alpha equivalence


def canonical_rule(rule: Rule) -> Rule:
    """Renumber variables in binder order: params first, then body binders."""
    mapping: dict[int, int] = {}

    def fresh(v: int) -> int:
        mapping[v] = len(mapping) + 1
        return mapping[v]

    params = tuple(fresh(p) for p in rule.params)

    def go(e: Expr) -> Expr:
        if isinstance(e, Var):
            return Var(mapping.get(e.id, e.id))
        if isinstance(e, (Lit,)):
            return e
        if isinstance(e, Cons):
            return Cons(e.name, tuple(go(a) for a in e.args))
        if isinstance(e, FunCall):
            return FunCall(e.name, tuple(go(a) for a in e.args))
        if isinstance(e, PartCall):
            return PartCall(e.name, e.missing, tuple(go(a) for a in e.args))
        if isinstance(e, Case):
            scrut = go(e.scrutinee)
            branches = []
            for b in e.branches:
                if isinstance(b.pattern, ConsPat):
                    pat = ConsPat(b.pattern.name, tuple(fresh(v) for v in b.pattern.vars))
                else:
                    pat = b.pattern
                branches.append(Branch(pat, go(b.body)))
            return Case(e.kind, scrut, tuple(branches))
        if isinstance(e, Or):
            return Or(go(e.left), go(e.right))
        if isinstance(e, Free):
            vs = tuple(fresh(v) for v in e.vars)
            return Free(vs, go(e.body))
        if isinstance(e, Apply):
            return Apply(go(e.fn), go(e.arg))
        raise TypeError(f"not an expression: {e!r}")

    return Rule(params, go(rule.body))


def canonical_function(f: FuncDecl) -> FuncDecl:
    if isinstance(f.rule, External):
        return FuncDecl(f.name, f.arity, None, f.rule)
    return FuncDecl(f.name, f.arity, None, canonical_rule(f.rule))


def canonicalize(program: Program) -> Program:
    """Canonical alpha-renaming of every rule; signatures and hints dropped."""
    return replace(program, functions=tuple(canonical_function(f)
                                            for f in program.functions))


def alpha_equal(a: Union[Program, FuncDecl], b: Union[Program, FuncDecl]) -> bool:
    """Structural equality up to variable renaming (ignores types/hints)."""
    if isinstance(a, FuncDecl) and isinstance(b, FuncDecl):
        return canonical_function(a) == canonical_function(b)
    if isinstance(a, Program) and isinstance(b, Program):
        return canonicalize(a) == canonicalize(b)
    return False


# ---------------------------------------------------------------------------
# Display


def show_type(t: TypeExpr, canonical: bool = True) -> str:
    """Human form of a type; ``[a]`` sugar for lists, arrows right-assoc.

    With ``canonical`` the type variables are renamed a, b, c ... in order
    of first occurrence, which is the form analyses report.
    """
    if canonical:
        t = _canon_type(t)

    def atom(x: TypeExpr) -> str:
        s = go(x)
        if isinstance(x, TFunc) or (isinstance(x, TCons) and x.args and x.name != "List"):
            return f"({s})"
        return s

    def go(x: TypeExpr) -> str:
        if isinstance(x, TVar):
            return x.name
        if isinstance(x, TCons):
            if x.name == "List" and len(x.args) == 1:
                return f"[{go(x.args[0])}]"
            if not x.args:
                return x.name
            return " ".join([x.name] + [atom(a) for a in x.args])
        if isinstance(x, TFunc):
            dom = go(x.dom)
            if isinstance(x.dom, TFunc):
                dom = f"({dom})"
            return f"{dom} -> {go(x.rng)}"
        raise TypeError(f"not a type expression: {x!r}")

    return go(t)


def _canon_type(t: TypeExpr) -> TypeExpr:
    order: dict[str, str] = {}

    def name(v: str) -> str:
        if v not in order:
            k = len(order)
            order[v] = "abcdefghijklmnopqrstuvwxyz"[k] if k < 26 else f"a{k}"
        return order[v]

    def go(x: TypeExpr) -> TypeExpr:
        if isinstance(x, TVar):
            return TVar(name(x.name))
        if isinstance(x, TCons):
            return TCons(x.name, tuple(go(a) for a in x.args))
        if isinstance(x, TFunc):
            return TFunc(go(x.dom), go(x.rng))
        raise TypeError(f"not a type expression: {x!r}")

    return go(t)


def show_term(e: Expr, names: Optional[dict[int, str]] = None) -> str:
    """Render a data term the way answers print: list sugar, infix cons."""
    names = names or {}

    def var_name(v: int) -> str:
        return names.get(v, f"_{v}")

    def list_spine(x: Expr):
        items = []
        while isinstance(x, Cons) and x.name == ":" and len(x.args) == 2:
            items.append(x.args[0])
            x = x.args[1]
        if isinstance(x, Cons) and x.name == "[]":
            return items, None
        return items, x

    def atom(x: Expr) -> str:
        s = go(x)
        needs = isinstance(x, (Apply,)) or \
            (isinstance(x, (Cons, FunCall)) and x.args and not s.startswith("[")) or \
            isinstance(x, PartCall)
        if isinstance(x, Cons) and x.name == ":":
            needs = True
        return f"({s})" if needs else s

    def go(x: Expr) -> str:
        if isinstance(x, Var):
            return var_name(x.id)
        if isinstance(x, Lit):
            return str(x.value)
        if isinstance(x, Cons):
            if x.name == ":" and len(x.args) == 2:
                items, tail = list_spine(x)
                if tail is None:
                    return "[" + ",".join(go(i) for i in items) + "]"
                parts = [atom(i) for i in items] + [atom(tail)]
                return " : ".join(parts)
            if x.name == "[]":
                return "[]"
            if not x.args:
                return x.name
            return " ".join([x.name] + [atom(a) for a in x.args])
        if isinstance(x, FunCall):
            if not x.args:
                return x.name
            return " ".join([x.name] + [atom(a) for a in x.args])
        if isinstance(x, PartCall):
            return " ".join([x.name] + [atom(a) for a in x.args])
        if isinstance(x, Apply):
            return f"{atom(x.fn)} {atom(x.arg)}"
        return f"<{type(x).__name__.lower()}>"

    return go(e)
