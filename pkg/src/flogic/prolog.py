"""Pure Prolog front end.

Accepts ISO-core clause syntax (facts, rules, ``=``, list sugar, ``%``
comments) and translates every predicate ``p/n`` into a flexible function
``p`` of arity ``n`` returning the constraint type:

* head arguments become patterns when several clauses discriminate on a
  constructor-rooted argument position; otherwise each clause becomes an
  equation-form alternative where non-variable arguments turn into ``=:=``
  constraints on the parameters, and alternatives join with ``Or``;
* repeated head variables are linearized by fresh primed variables plus
  prefixed ``=:=`` equations;
* clause bodies become ``&>``-chains of goal calls and an empty chain is
  the trivial constraint.

Atoms, integers and compound functors all populate one synthesized data
type ``Term`` (integers become nullary constructors named by their decimal
text since pure Prolog has no arithmetic); list notation maps onto the
predeclared list type.  Unsupported constructs (cut, negation, arithmetic)
raise errors naming the construct.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .ir import ConsDecl, Program, TCons, TypeDecl
from . import prelude
from .surface import (
    Equation, SApp, SExpr, SLit, SName, SPat, SPCons, SPVar, SurfaceDecl,
    compile_patterns,
)


class PrologError(Exception):
    pass


class PrologSyntaxError(PrologError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnsupportedPrologError(PrologError):
    def __init__(self, construct: str, line: int = 0):
        where = f" (line {line})" if line else ""
        super().__init__(f"unsupported construct: {construct}{where}")
        self.construct = construct


class PrologTranslationError(PrologError):
    pass


# ---------------------------------------------------------------------------
# Terms and clauses


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PAtom:
    name: str


@dataclass(frozen=True)
class PInt:
    value: int


@dataclass(frozen=True)
class PCompound:
    name: str
    args: tuple["PTerm", ...]


PTerm = Union[PVar, PAtom, PInt, PCompound]


@dataclass(frozen=True)
class PrologClause:
    head: PTerm
    body: tuple[PTerm, ...]
    line: int


# ---------------------------------------------------------------------------
# Parser


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1
        self.toks: list[tuple[str, str, int, int]] = []
        self._run()

    def _advance(self, n: int):
        for _ in range(n):
            if self.text[self.i] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def _run(self):
        text = self.text
        while self.i < len(text):
            c = text[self.i]
            if c in " \t\r\n":
                self._advance(1)
                continue
            if c == "%":
                while self.i < len(text) and text[self.i] != "\n":
                    self._advance(1)
                continue
            line, col = self.line, self.col
            if c == "!":
                raise UnsupportedPrologError("cut (!)", line)
            if c == "\\" and text.startswith("\\+", self.i):
                raise UnsupportedPrologError("negation (\\+)", line)
            if c == ":" and text.startswith(":-", self.i):
                self.toks.append(("neck", ":-", line, col))
                self._advance(2)
                continue
            if c.isdigit() or (c == "-" and self.i + 1 < len(text)
                               and text[self.i + 1].isdigit()):
                j = self.i + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[self.i:j], line, col))
                self._advance(j - self.i)
                continue
            if c.isalpha() or c == "_":
                j = self.i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                word = text[self.i:j]
                kind = "var" if (c == "_" or c.isupper()) else "atom"
                self.toks.append((kind, word, line, col))
                self._advance(j - self.i)
                continue
            simple = {"(": "lparen", ")": "rparen", "[": "lbracket",
                      "]": "rbracket", ",": "comma", "|": "bar",
                      "=": "unify", ".": "dot"}
            if c in simple:
                self.toks.append((simple[c], c, line, col))
                self._advance(1)
                continue
            raise PrologSyntaxError(f"unexpected character {c!r}", line, col)


class _PParser:
    def __init__(self, text: str):
        self.toks = _Lexer(text).toks
        self.pos = 0
        self.anon = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else ("", "", 1, 1)
            raise PrologSyntaxError("unexpected end of input", last[2], last[3])
        self.pos += 1
        return t

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            raise PrologSyntaxError(f"expected {kind}, found {t[1]!r}", t[2], t[3])
        return t

    def at(self, kind: str) -> bool:
        t = self.peek()
        return t is not None and t[0] == kind

    def clauses(self) -> list[PrologClause]:
        out = []
        while self.peek() is not None:
            out.append(self.clause())
        return out

    def clause(self) -> PrologClause:
        start = self.peek()
        head = self.term()
        if not isinstance(head, (PAtom, PCompound)):
            raise PrologSyntaxError("clause head must be an atom or compound",
                                    start[2], start[3])
        body: list[PTerm] = []
        if self.at("neck"):
            self.next()
            body.append(self.goal())
            while self.at("comma"):
                self.next()
                body.append(self.goal())
        self.expect("dot")
        return PrologClause(head, tuple(body), start[2])

    def goal(self) -> PTerm:
        t = self.term()
        if self.at("unify"):
            self.next()
            return PCompound("=", (t, self.term()))
        if isinstance(t, (PVar, PInt)):
            raise PrologSyntaxError("goal must be a predicate call",
                                    *self._here())
        return t

    def _here(self):
        t = self.peek() or self.toks[-1]
        return t[2], t[3]

    def term(self) -> PTerm:
        t = self.next()
        kind, text, line, col = t
        if kind == "int":
            return PInt(int(text))
        if kind == "var":
            if text == "_":
                self.anon += 1
                return PVar(f"_G{self.anon}")
            return PVar(text)
        if kind == "atom":
            if self.at("lparen"):
                self.next()
                args = [self.term()]
                while self.at("comma"):
                    self.next()
                    args.append(self.term())
                self.expect("rparen")
                return PCompound(text, tuple(args))
            return PAtom(text)
        if kind == "lbracket":
            if self.at("rbracket"):
                self.next()
                return PAtom("[]")
            items = [self.term()]
            while self.at("comma"):
                self.next()
                items.append(self.term())
            tail: PTerm = PAtom("[]")
            if self.at("bar"):
                self.next()
                tail = self.term()
            self.expect("rbracket")
            for item in reversed(items):
                tail = PCompound(":", (item, tail))
            return tail
        raise PrologSyntaxError(f"expected a term, found {text!r}", line, col)


def parse_prolog(text: str) -> list[PrologClause]:
    return _PParser(text).clauses()


# ---------------------------------------------------------------------------
# Translation


def _functor(head: PTerm) -> tuple[str, int]:
    if isinstance(head, PAtom):
        return head.name, 0
    assert isinstance(head, PCompound)
    return head.name, len(head.args)


def _collect_functors(t: PTerm, acc: dict[str, int], line: int):
    """Data constructors appearing in argument positions."""
    if isinstance(t, PAtom):
        if t.name != "[]":
            _record(acc, t.name, 0, line)
    elif isinstance(t, PInt):
        _record(acc, str(t.value), 0, line)
    elif isinstance(t, PCompound):
        if t.name != ":":
            _record(acc, t.name, len(t.args), line)
        for a in t.args:
            _collect_functors(a, acc, line)


def _record(acc: dict[str, int], name: str, arity: int, line: int):
    if name in acc and acc[name] != arity:
        raise PrologTranslationError(
            f"functor {name} used with arities {acc[name]} and {arity} "
            f"(line {line})")
    acc[name] = arity


def _term_vars(t: PTerm, acc: list[str]):
    if isinstance(t, PVar):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, PCompound):
        for a in t.args:
            _term_vars(a, acc)


def _term_sexpr(t: PTerm) -> SExpr:
    if isinstance(t, PVar):
        return SName(t.name)
    if isinstance(t, PAtom):
        return SName(t.name)
    if isinstance(t, PInt):
        # resolves against the synthesized numeral constructor
        return SName(str(t.value))
    args = tuple(_term_sexpr(a) for a in t.args)
    return SApp(SName(t.name), args)


def _goal_sexpr(g: PTerm) -> SExpr:
    if isinstance(g, PCompound) and g.name == "=":
        return SApp(SName("=:="), tuple(_term_sexpr(a) for a in g.args))
    if isinstance(g, PAtom):
        return SName(g.name)
    assert isinstance(g, PCompound)
    return SApp(SName(g.name), tuple(_term_sexpr(a) for a in g.args))


def _chain(parts: list[SExpr]) -> SExpr:
    if not parts:
        return SName("Success")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = SApp(SName("&>"), (p, out))
    return out


class _ClauseShaper:
    """Builds one surface equation out of one clause."""

    def __init__(self, clause: PrologClause):
        self.clause = clause
        self.used: list[str] = []
        _term_vars(clause.head, self.used)
        for g in clause.body:
            _term_vars(g, self.used)
        self.used_set = set(self.used)

    def fresh(self, base: str) -> str:
        name = base + "'"
        while name in self.used_set:
            name += "'"
        self.used_set.add(name)
        return name

    def head_args(self) -> list[PTerm]:
        h = self.clause.head
        return list(h.args) if isinstance(h, PCompound) else []

    def pattern_form(self) -> Equation:
        """Head arguments as (linearized) nested patterns."""
        seen: set[str] = set()
        eqs: list[SExpr] = []

        def pat(t: PTerm) -> SPat:
            if isinstance(t, PVar):
                if t.name in seen:
                    alias = self.fresh(t.name)
                    eqs.append(SApp(SName("=:="), (SName(t.name), SName(alias))))
                    return SPVar(alias)
                seen.add(t.name)
                return SPVar(t.name)
            if isinstance(t, PAtom):
                return SPCons(t.name)
            if isinstance(t, PInt):
                return SPCons(str(t.value))
            return SPCons(t.name, tuple(pat(a) for a in t.args))

        patterns = tuple(pat(a) for a in self.head_args())
        parts = eqs + [_goal_sexpr(g) for g in self.clause.body]
        frees = tuple(v for v in self.used if v not in seen)
        return Equation(patterns, None, _chain(parts), frees, self.clause.line)

    def equation_form(self) -> Equation:
        """All-variable parameters with `=:=` constraints for other args."""
        seen: set[str] = set()
        params: list[SPat] = []
        eqs: list[SExpr] = []
        for i, t in enumerate(self.head_args(), start=1):
            if isinstance(t, PVar) and t.name not in seen:
                seen.add(t.name)
                params.append(SPVar(t.name))
                continue
            name = self.fresh(f"arg{i}")
            params.append(SPVar(name))
            eqs.append(SApp(SName("=:="), (SName(name), _term_sexpr(t))))
        parts = eqs + [_goal_sexpr(g) for g in self.clause.body]
        frees = tuple(v for v in self.used if v not in seen)
        return Equation(tuple(params), None, _chain(parts), frees,
                        self.clause.line)


def _discriminating(clauses: list[PrologClause]) -> bool:
    """Some argument position is constructor-rooted in every head."""
    heads = [c.head.args if isinstance(c.head, PCompound) else ()
             for c in clauses]
    return any(all(not isinstance(h[col], PVar) for h in heads)
               for col in range(len(heads[0])))


TERM = TCons("Term")


def translate_prolog(clauses: list[PrologClause],
                     module: str = "Main") -> Program:
    """Whole-program translation of a clause list."""
    by_pred: dict[tuple[str, int], list[PrologClause]] = {}
    order: list[tuple[str, int]] = []
    functors: dict[str, int] = {}
    for c in clauses:
        key = _functor(c.head)
        if key not in by_pred:
            by_pred[key] = []
            order.append(key)
        by_pred[key].append(c)
        if isinstance(c.head, PCompound):
            for a in c.head.args:
                _collect_functors(a, functors, c.line)
        for g in c.body:
            gargs = g.args if isinstance(g, PCompound) else ()
            for a in gargs:
                _collect_functors(a, functors, c.line)

    preds: dict[str, int] = {}
    for name, arity in order:
        if name in preds:
            raise PrologTranslationError(
                f"predicate {name} defined with arities {preds[name]} and {arity}")
        preds[name] = arity
    for name in preds:
        if name in functors:
            raise PrologTranslationError(
                f"{name} is used both as a predicate and as a data functor")
        if prelude.is_builtin(name):
            raise PrologTranslationError(f"{name} is a reserved name")

    types: list[TypeDecl] = list(prelude.PRELUDE_TYPES)
    if functors:
        cons = tuple(ConsDecl(name, arity, (TERM,) * arity)
                     for name, arity in sorted(functors.items()))
        types.append(TypeDecl("Term", (), cons))

    decls = []
    for name, arity in order:
        group = by_pred[(name, arity)]
        if len(group) > 1 and _discriminating(group):
            eqs = tuple(_ClauseShaper(c).pattern_form() for c in group)
        else:
            eqs = tuple(_ClauseShaper(c).equation_form() for c in group)
        decls.append(SurfaceDecl(name, eqs, annotation="flex",
                                 signature=None, line=group[0].line))

    return compile_patterns(decls, types, module)


def compile_prolog(text: str, module: str = "Main") -> tuple[Program, set[str]]:
    """Parse and translate; every predicate is pinned flexible."""
    program = translate_prolog(parse_prolog(text), module)
    return program, {f.name for f in program.functions}
