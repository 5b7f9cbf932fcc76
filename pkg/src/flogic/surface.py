"""Surface language front end: lexer, parser and pattern-match compiler.

The surface syntax is a small equational language: data declarations,
optional type signatures, optional ``name eval flex|rigid`` annotations and
one or more defining equations per function.  Equations may carry a guard
(``f x | g = e``) and trailing logic variables (``where x, ys free``).

``compile_patterns`` turns equation groups into the flat representation:
pattern matching becomes nested case expressions chosen left-to-right at
positions where every remaining equation demands a constructor; where no
such position exists the equations split into groups joined by ``Or``.
Guards become calls of the ``cond`` builtin.

Functions default to rigid matching; a declared result of type ``Success``
or an explicit ``eval flex`` annotation selects flexible (narrowing) cases.
A data declaration may use integer tokens as nullary constructor names
(``data Nat = 0 | Succ Nat``); such numerals then denote constructors
throughout the module rather than machine integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .ir import (
    Branch, Case, Cons, ConsDecl, ConsPat, Expr, FunCall, Free, FuncDecl,
    Lit, LitPat, Or, PartCall, Program, Rule, TCons, TFunc, TVar, TypeDecl,
    Var, Apply,
)
from . import prelude


class SurfaceError(Exception):
    pass


class SurfaceSyntaxError(SurfaceError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class SurfaceCompileError(SurfaceError):
    pass


# ---------------------------------------------------------------------------
# Lexer

_KEYWORDS = {"data", "eval", "where", "free"}
_SYMBOL_CHARS = set(":+-*=<>&|.")
_OPERATORS = {
    "::", "->", "=:=", "==", "<=", "<", "&>", "&", ":", "+", "-", "*",
    "=", "|",
}


@dataclass(frozen=True)
class Token:
    kind: str  # int lident uident op kw lparen rparen lbracket rbracket comma wild
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word == "_":
                kind = "wild"
            elif word in _KEYWORDS:
                kind = "kw"
            elif word[0].isupper():
                kind = "uident"
            else:
                kind = "lident"
            toks.append(Token(kind, word, line, start_col))
            col += j - i
            i = j
            continue
        simple = {"(": "lparen", ")": "rparen", "[": "lbracket",
                  "]": "rbracket", ",": "comma", ";": "semi"}
        if c in simple:
            toks.append(Token(simple[c], c, line, start_col))
            i += 1
            col += 1
            continue
        if c in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            op = text[i:j]
            if op not in _OPERATORS:
                raise SurfaceSyntaxError(f"unknown operator {op!r}", line, start_col)
            toks.append(Token("op", op, line, start_col))
            col += j - i
            i = j
            continue
        raise SurfaceSyntaxError(f"unexpected character {c!r}", line, start_col)
    return toks


def _split_decls(tokens: list[Token]) -> list[list[Token]]:
    """One declaration per line; indented lines continue, `;` separates."""
    groups: list[list[Token]] = []
    cur: list[Token] = []
    for t in tokens:
        if t.kind == "semi":
            if cur:
                groups.append(cur)
                cur = []
            continue
        if t.col == 1 and cur:
            groups.append(cur)
            cur = []
        cur.append(t)
    if cur:
        groups.append(cur)
    return groups


# ---------------------------------------------------------------------------
# Surface trees


@dataclass(frozen=True)
class SName:
    name: str


@dataclass(frozen=True)
class SLit:
    value: int


@dataclass(frozen=True)
class SApp:
    head: "SExpr"
    args: tuple["SExpr", ...]


SExpr = Union[SName, SLit, SApp]


@dataclass(frozen=True)
class SPVar:
    name: str


@dataclass(frozen=True)
class SPWild:
    pass


@dataclass(frozen=True)
class SPLit:
    value: int


@dataclass(frozen=True)
class SPCons:
    name: str
    args: tuple["SPat", ...] = ()


SPat = Union[SPVar, SPWild, SPLit, SPCons]


@dataclass(frozen=True)
class Equation:
    patterns: tuple[SPat, ...]
    guard: Optional[SExpr]
    body: SExpr
    frees: tuple[str, ...]
    line: int


@dataclass(frozen=True)
class SurfaceDecl:
    """All surface information about one function."""

    name: str
    equations: tuple[Equation, ...]
    annotation: Optional[str] = None  # "flex" | "rigid"
    signature: Optional[object] = None  # TypeExpr
    line: int = 0


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple[str, ...]
    constructors: tuple[ConsDecl, ...]
    line: int = 0


# Fixed operator table: (precedence, associativity).
_OPTABLE = {
    "&": (0, "right"),
    "&>": (0, "right"),
    "=:=": (4, "none"),
    "==": (4, "none"),
    "<": (4, "none"),
    "<=": (4, "none"),
    ":": (5, "right"),
    "+": (6, "left"),
    "-": (6, "left"),
    "*": (7, "left"),
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Optional[Token]:
        i = self.pos + ahead
        return self.toks[i] if i < len(self.toks) else None

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else Token("", "", 1, 1)
            raise SurfaceSyntaxError("unexpected end of declaration",
                                     last.line, last.col + len(last.text))
        self.pos += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SurfaceSyntaxError(f"expected {want}, found {t.text!r}",
                                     t.line, t.col)
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind and (text is None or t.text == text)

    def done(self) -> bool:
        return self.pos >= len(self.toks)

    def fail(self, message: str):
        t = self.peek() or self.toks[-1]
        raise SurfaceSyntaxError(message, t.line, t.col)

    # -- types

    def type_expr(self):
        t = self.btype()
        if self.at("op", "->"):
            self.next()
            return TFunc(t, self.type_expr())
        return t

    def btype(self):
        atoms = [self.atype()]
        while not self.done() and (self.at("lident") or self.at("uident")
                                   or self.at("lparen") or self.at("lbracket")):
            atoms.append(self.atype())
        if len(atoms) == 1:
            return atoms[0]
        head = atoms[0]
        if not (isinstance(head, TCons) and not head.args):
            self.fail("only named types can be applied to arguments")
        return TCons(head.name, tuple(atoms[1:]))

    def atype(self):
        t = self.next()
        if t.kind == "lident":
            return TVar(t.text)
        if t.kind == "uident":
            return TCons(t.text)
        if t.kind == "lbracket":
            inner = self.type_expr()
            self.expect("rbracket")
            return TCons("List", (inner,))
        if t.kind == "lparen":
            inner = self.type_expr()
            self.expect("rparen")
            return inner
        raise SurfaceSyntaxError(f"expected a type, found {t.text!r}", t.line, t.col)

    # -- patterns

    def pattern(self) -> SPat:
        p = self.appat()
        if self.at("op", ":"):
            self.next()
            return SPCons(":", (p, self.pattern()))
        return p

    def appat(self) -> SPat:
        if self.at("uident"):
            name = self.next().text
            args = []
            while self._at_apat_start():
                args.append(self.apat())
            return SPCons(name, tuple(args))
        return self.apat()

    def _at_apat_start(self) -> bool:
        t = self.peek()
        return t is not None and t.kind in (
            "lident", "uident", "int", "wild", "lparen", "lbracket")

    def apat(self) -> SPat:
        t = self.next()
        if t.kind == "lident":
            return SPVar(t.text)
        if t.kind == "wild":
            return SPWild()
        if t.kind == "int":
            return SPLit(int(t.text))
        if t.kind == "uident":
            return SPCons(t.text)
        if t.kind == "lbracket":
            items = []
            if not self.at("rbracket"):
                items.append(self.pattern())
                while self.at("comma"):
                    self.next()
                    items.append(self.pattern())
            self.expect("rbracket")
            out: SPat = SPCons("[]")
            for item in reversed(items):
                out = SPCons(":", (item, out))
            return out
        if t.kind == "lparen":
            inner = self.pattern()
            self.expect("rparen")
            return inner
        raise SurfaceSyntaxError(f"expected a pattern, found {t.text!r}",
                                 t.line, t.col)

    # -- expressions

    def expr(self, min_prec: int = 0) -> SExpr:
        left = self.app_expr()
        while True:
            t = self.peek()
            if t is None or t.kind != "op" or t.text not in _OPTABLE:
                return left
            prec, assoc = _OPTABLE[t.text]
            if prec < min_prec:
                return left
            self.next()
            if assoc == "left":
                right = self.expr(prec + 1)
            elif assoc == "right":
                right = self.expr(prec)
            else:
                right = self.expr(prec + 1)
                nxt = self.peek()
                if nxt is not None and nxt.kind == "op" \
                        and _OPTABLE.get(nxt.text, (None,))[0] == prec:
                    raise SurfaceSyntaxError(
                        f"operator {nxt.text} does not associate", nxt.line, nxt.col)
            left = SApp(SName(t.text), (left, right))

    def app_expr(self) -> SExpr:
        head = self.atom()
        args = []
        while self._at_atom_start():
            args.append(self.atom())
        return SApp(head, tuple(args)) if args else head

    def _at_atom_start(self) -> bool:
        t = self.peek()
        return t is not None and t.kind in (
            "lident", "uident", "int", "lparen", "lbracket")

    def atom(self) -> SExpr:
        t = self.next()
        if t.kind == "int":
            return SLit(int(t.text))
        if t.kind in ("lident", "uident"):
            return SName(t.text)
        if t.kind == "lparen":
            inner = self.expr()
            self.expect("rparen")
            return inner
        if t.kind == "lbracket":
            items = []
            if not self.at("rbracket"):
                items.append(self.expr())
                while self.at("comma"):
                    self.next()
                    items.append(self.expr())
            self.expect("rbracket")
            out: SExpr = SName("[]")
            for item in reversed(items):
                out = SApp(SName(":"), (item, out))
            return out
        raise SurfaceSyntaxError(f"expected an expression, found {t.text!r}",
                                 t.line, t.col)

    def free_suffix(self) -> tuple[str, ...]:
        """`where x, ys free` after a body or goal."""
        self.expect("kw", "where")
        names = [self.expect("lident").text]
        while self.at("comma"):
            self.next()
            names.append(self.expect("lident").text)
        self.expect("kw", "free")
        return tuple(names)


# ---------------------------------------------------------------------------
# Declaration parsing


def _parse_data(p: _Parser) -> DataDecl:
    first = p.expect("kw", "data")
    name = p.expect("uident").text
    params = []
    while p.at("lident"):
        params.append(p.next().text)
    p.expect("op", "=")
    cons = [_parse_alt(p)]
    while p.at("op", "|"):
        p.next()
        cons.append(_parse_alt(p))
    if not p.done():
        p.fail("trailing tokens after data declaration")
    return DataDecl(name, tuple(params), tuple(cons), first.line)


def _parse_alt(p: _Parser) -> ConsDecl:
    # Infix alternative `t1 : t2` takes precedence when a colon follows.
    mark = p.pos
    try:
        left = p.atype()
        if p.at("op", ":"):
            p.next()
            right = p.btype()
            return ConsDecl(":", 2, (left, right))
    except SurfaceSyntaxError:
        pass
    p.pos = mark
    t = p.next()
    if t.kind == "uident":
        cname = t.text
    elif t.kind == "int":
        cname = t.text
    elif t.kind == "lbracket":
        p.expect("rbracket")
        cname = "[]"
    else:
        raise SurfaceSyntaxError(f"expected a constructor, found {t.text!r}",
                                 t.line, t.col)
    args = []
    while not p.done() and not p.at("op", "|"):
        args.append(p.atype())
    return ConsDecl(cname, len(args), tuple(args))


def _parse_equation(p: _Parser, name: str, line: int) -> Equation:
    pats = []
    while not (p.at("op", "=") or p.at("op", "|")):
        pats.append(p.apat())
    guard = None
    if p.at("op", "|"):
        p.next()
        guard = p.expr()
    p.expect("op", "=")
    body = p.expr()
    frees: tuple[str, ...] = ()
    if p.at("kw", "where"):
        frees = p.free_suffix()
    if not p.done():
        p.fail("trailing tokens after equation")
    return Equation(tuple(pats), guard, body, frees, line)


def parse_module(text: str) -> tuple[list[DataDecl], list[SurfaceDecl]]:
    """Parse a module into data declarations and per-function groups."""
    datas: list[DataDecl] = []
    sigs: dict[str, object] = {}
    anns: dict[str, str] = {}
    order: list[str] = []
    equations: dict[str, list[Equation]] = {}
    closed: set[str] = set()

    for group in _split_decls(tokenize(text)):
        p = _Parser(group)
        first = group[0]
        if p.at("kw", "data"):
            datas.append(_parse_data(p))
            continue
        if first.kind != "lident":
            raise SurfaceSyntaxError(
                f"expected a declaration, found {first.text!r}",
                first.line, first.col)
        name = p.next().text
        if p.at("op", "::"):
            p.next()
            if name in sigs:
                raise SurfaceSyntaxError(f"duplicate signature for {name}",
                                         first.line, first.col)
            sigs[name] = p.type_expr()
            if not p.done():
                p.fail("trailing tokens after signature")
        elif p.at("kw", "eval"):
            p.next()
            mode = p.expect("lident")
            if mode.text not in ("flex", "rigid"):
                raise SurfaceSyntaxError("annotation must be flex or rigid",
                                         mode.line, mode.col)
            if name in anns:
                raise SurfaceSyntaxError(f"duplicate annotation for {name}",
                                         first.line, first.col)
            anns[name] = mode.text
            if not p.done():
                p.fail("trailing tokens after annotation")
        else:
            if name in closed:
                raise SurfaceSyntaxError(
                    f"equations for {name} are not contiguous",
                    first.line, first.col)
            if name not in equations:
                for prev in order:
                    closed.add(prev)
                order.append(name)
                equations[name] = []
            equations[name].append(_parse_equation(p, name, first.line))

    decls = []
    for name in order:
        eqs = equations[name]
        decls.append(SurfaceDecl(name, tuple(eqs), anns.get(name),
                                 sigs.get(name), eqs[0].line))
    for name in set(sigs) | set(anns):
        if name not in equations:
            raise SurfaceCompileError(
                f"{name}: signature or annotation without defining equations")
    return datas, decls


def parse_surface(text: str) -> list[SurfaceDecl]:
    """Function declarations of a module, in source order."""
    return parse_module(text)[1]


def parse_goal(text: str) -> tuple[SExpr, tuple[str, ...]]:
    toks = tokenize(text)
    if not toks:
        raise SurfaceSyntaxError("empty goal", 1, 1)
    p = _Parser(toks)
    e = p.expr()
    frees: tuple[str, ...] = ()
    if p.at("kw", "where"):
        frees = p.free_suffix()
    if not p.done():
        p.fail("trailing tokens after goal")
    return e, frees


# ---------------------------------------------------------------------------
# Pattern-match compilation


@dataclass
class _Row:
    pats: list[SPat]
    eq: Equation


class _Resolver:
    """Shared name resolution for function bodies and goals."""

    def __init__(self, ctors: dict[str, ConsDecl], funcs: dict[str, int],
                 numerals: set[str], where: str):
        self.ctors = ctors
        self.funcs = funcs
        self.numerals = numerals
        self.where = where

    def error(self, message: str) -> SurfaceCompileError:
        return SurfaceCompileError(f"{self.where}: {message}")

    def resolve(self, e: SExpr, env: dict[str, int]) -> Expr:
        if isinstance(e, SLit):
            if str(e.value) in self.numerals:
                return Cons(str(e.value))
            return Lit(e.value)
        if isinstance(e, SName):
            return self._name(e.name, [], env)
        if isinstance(e, SApp):
            args = [self.resolve(a, env) for a in e.args]
            if isinstance(e.head, SName):
                return self._name(e.head.name, args, env)
            return _apply_chain(self.resolve(e.head, env), args)
        raise self.error(f"cannot resolve {e!r}")

    def _name(self, name: str, args: list[Expr], env: dict[str, int]) -> Expr:
        if name in env:
            return _apply_chain(Var(env[name]), args)
        c = self.ctors.get(name)
        if c is not None:
            if len(args) == c.arity:
                return Cons(name, tuple(args))
            if len(args) < c.arity:
                return PartCall(name, c.arity - len(args), tuple(args))
            raise self.error(f"constructor {name} applied to too many arguments")
        arity = self.funcs.get(name)
        if arity is None:
            raise self.error(f"unknown name {name}")
        if len(args) == arity:
            return FunCall(name, tuple(args))
        if len(args) < arity:
            return PartCall(name, arity - len(args), tuple(args))
        return _apply_chain(FunCall(name, tuple(args[:arity])), args[arity:])


def _apply_chain(fn: Expr, args: list[Expr]) -> Expr:
    for a in args:
        fn = Apply(fn, a)
    return fn


class _FunCompiler:
    def __init__(self, decl: SurfaceDecl, resolver: _Resolver,
                 ctors: dict[str, ConsDecl], kind: str):
        self.decl = decl
        self.resolver = resolver
        self.ctors = ctors
        self.kind = kind
        self.next_id = 1
        self.hints: dict[int, str] = {}

    def fresh(self, hint: Optional[str] = None) -> int:
        v = self.next_id
        self.next_id += 1
        if hint:
            self.hints[v] = hint
        return v

    def error(self, message: str) -> SurfaceCompileError:
        return SurfaceCompileError(f"{self.decl.name}: {message}")

    def compile(self) -> Rule:
        eqs = self.decl.equations
        arity = len(eqs[0].patterns)
        for eq in eqs[1:]:
            if len(eq.patterns) != arity:
                raise self.error(
                    f"equations have contradictory arities "
                    f"({arity} vs {len(eq.patterns)}, line {eq.line})")
        params = []
        for i in range(arity):
            p0 = eqs[0].patterns[i]
            params.append(self.fresh(p0.name if isinstance(p0, SPVar) else None))
        rows = [_Row([self._norm(p) for p in eq.patterns], eq) for eq in eqs]
        body = self.match(list(params), rows)
        return Rule(tuple(params), body, tuple(sorted(self.hints.items())))

    def _norm(self, p: SPat) -> SPat:
        """Numeral literals denote constructors when so declared."""
        if isinstance(p, SPLit) and str(p.value) in self.resolver.numerals:
            return SPCons(str(p.value))
        if isinstance(p, SPCons):
            return SPCons(p.name, tuple(self._norm(a) for a in p.args))
        return p

    def match(self, occs: list[int], rows: list[_Row]) -> Expr:
        if not rows:
            return FunCall("failed")
        if _all_vars(rows[0].pats):
            first = self.leaf(occs, rows[0])
            rest = rows[1:]
            return first if not rest else Or(first, self.match(occs, rest))
        k = len(rows)
        while k >= 1:
            col = _uniform_column([r.pats for r in rows[:k]])
            if col is not None:
                break
            k -= 1
        group, rest = rows[:k], rows[k:]
        expr = self.case_split(occs, col, group)
        return expr if not rest else Or(expr, self.match(occs, rest))

    def case_split(self, occs: list[int], col: int, rows: list[_Row]) -> Expr:
        scrut = occs[col]
        heads = []
        for r in rows:
            h = r.pats[col]
            key = h.value if isinstance(h, SPLit) else h.name
            if key not in heads:
                heads.append(key)
        branches = []
        for key in heads:
            if isinstance(key, int):
                sub = [_Row(r.pats[:col] + r.pats[col + 1:], r.eq)
                       for r in rows
                       if isinstance(r.pats[col], SPLit) and r.pats[col].value == key]
                sub_occs = occs[:col] + occs[col + 1:]
                branches.append(Branch(LitPat(key), self.match(sub_occs, sub)))
                continue
            cdecl = self.ctors.get(key)
            if cdecl is None:
                raise self.error(f"unknown constructor {key} in pattern")
            sub = [r for r in rows
                   if isinstance(r.pats[col], SPCons) and r.pats[col].name == key]
            for r in sub:
                if len(r.pats[col].args) != cdecl.arity:
                    raise self.error(
                        f"constructor {key} expects {cdecl.arity} arguments "
                        f"(line {r.eq.line})")
            first_sub = sub[0].pats[col].args
            vs = [self.fresh(sp.name if isinstance(sp, SPVar) else None)
                  for sp in first_sub]
            sub_rows = [_Row(r.pats[:col] + list(r.pats[col].args) + r.pats[col + 1:],
                             r.eq) for r in sub]
            sub_occs = occs[:col] + vs + occs[col + 1:]
            branches.append(Branch(ConsPat(key, tuple(vs)),
                                   self.match(sub_occs, sub_rows)))
        return Case(self.kind, Var(scrut), tuple(branches))

    def leaf(self, occs: list[int], row: _Row) -> Expr:
        env: dict[str, int] = {}
        for pat, occ in zip(row.pats, occs):
            if isinstance(pat, SPVar):
                if pat.name in env:
                    raise self.error(
                        f"repeated variable {pat.name} in patterns "
                        f"(line {row.eq.line})")
                env[pat.name] = occ
        free_ids = []
        for name in row.eq.frees:
            if name in env:
                raise self.error(
                    f"free variable {name} shadows a pattern variable "
                    f"(line {row.eq.line})")
            v = self.fresh(name)
            env[name] = v
            free_ids.append(v)
        body = self.resolver.resolve(row.eq.body, env)
        if row.eq.guard is not None:
            body = FunCall("cond", (self.resolver.resolve(row.eq.guard, env), body))
        if free_ids:
            body = Free(tuple(free_ids), body)
        return body


def _all_vars(pats: list[SPat]) -> bool:
    return all(isinstance(p, (SPVar, SPWild)) for p in pats)


def _uniform_column(rows: list[list[SPat]]) -> Optional[int]:
    """Leftmost position where every row demands the same pattern flavor."""
    width = len(rows[0])
    for col in range(width):
        if all(isinstance(r[col], SPCons) for r in rows):
            return col
        if all(isinstance(r[col], SPLit) for r in rows):
            return col
    return None


# ---------------------------------------------------------------------------
# Module assembly


def compile_patterns(decls: list[SurfaceDecl], types: list[TypeDecl],
                     module: str = "Main") -> Program:
    """Compile function groups against the full type environment.

    ``types`` must already include the predeclared types; the result still
    carries whatever rigid/flex choice the declarations force (the loader
    may later flip unannotated functions whose inferred result is Success).
    """
    ctors: dict[str, ConsDecl] = {}
    for t in types:
        for c in t.constructors:
            ctors.setdefault(c.name, c)
    numerals = {c for c in ctors if c.isdigit()}
    funcs = {d.name: len(d.equations[0].patterns) for d in decls}
    for name, b in prelude.BUILTINS.items():
        funcs.setdefault(name, b.arity)

    functions = []
    for d in decls:
        if not d.equations:
            raise SurfaceCompileError(f"{d.name}: no defining equations")
        kind = case_kind(d)
        resolver = _Resolver(ctors, funcs, numerals, d.name)
        rule = _FunCompiler(d, resolver, ctors, kind).compile()
        functions.append(FuncDecl(d.name, len(rule.params), d.signature, rule))
    return Program(module, (), tuple(types), tuple(functions))


def case_kind(decl: SurfaceDecl) -> str:
    """flex for `eval flex` or a declared Success result, else rigid."""
    if decl.annotation is not None:
        return decl.annotation
    sig = decl.signature
    if sig is not None:
        t = sig
        while isinstance(t, TFunc):
            t = t.rng
        if isinstance(t, TCons) and t.name == "Success":
            return "flex"
    return "rigid"


def pinned_functions(decls: list[SurfaceDecl]) -> set[str]:
    """Functions whose matching kind must not be changed by inference."""
    return {d.name for d in decls
            if d.annotation is not None or d.signature is not None}


def compile_module(text: str, module: str = "Main") -> tuple[Program, set[str]]:
    """Parse and compile a surface module; also report the pinned set."""
    datas, decls = parse_module(text)
    user_types = [TypeDecl(d.name, d.params, d.constructors) for d in datas]
    program = prelude.ensure_prelude(
        Program(module, (), tuple(user_types), ()))
    types = list(program.types)
    out = compile_patterns(decls, types, module)
    return out, pinned_functions(decls)


def compile_goal(program: Program, text: str):
    """Compile a goal against a loaded program.

    Returns the goal expression with open variable ids 1..k for the
    `where .. free` names, plus the id-to-name hint map.
    """
    sexpr, frees = parse_goal(text)
    ctors: dict[str, ConsDecl] = {}
    for t in program.types:
        for c in t.constructors:
            ctors.setdefault(c.name, c)
    numerals = {c for c in ctors if c.isdigit()}
    funcs = {f.name: f.arity for f in program.functions}
    for name, b in prelude.BUILTINS.items():
        funcs.setdefault(name, b.arity)
    env: dict[str, int] = {}
    for i, name in enumerate(frees, start=1):
        if name in env:
            raise SurfaceCompileError(f"goal: repeated free variable {name}")
        env[name] = i
    resolver = _Resolver(ctors, funcs, numerals, "goal")
    expr = resolver.resolve(sexpr, env)
    return expr, {i: name for name, i in env.items()}
